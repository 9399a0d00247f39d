#include <gtest/gtest.h>

#include <cstdlib>

#include "fixture_server.hpp"
#include "hvd/error.hpp"
#include "hvd/harvester.hpp"
#include "hvd/snapshot_io.hpp"
#include "test_support.hpp"

using namespace hvd;
using namespace std::chrono_literals;
using testing_support::FixtureServer;
using json = nlohmann::json;

namespace {

HarvestConfig local_config() {
  HarvestConfig c;
  c.scheme = "http";
  c.page_size = 100;
  c.base_backoff = 1ms;
  c.rate_limit = 1000;
  c.timeout = 2000ms;
  return c;
}

PortalSpec local_portal(const std::string& domain, std::string name = "Fixture") {
  return PortalSpec{std::move(name), domain, 5000, Engine::socrata};
}

}  // namespace

TEST(HarvestPortal, PaginatesUntilShortPage) {
  FixtureServer server(testing_support::paged_listing(testing_support::dataset_listing(137)));
  HarvestReport report;
  auto snap = harvest_portal(local_portal(server.domain()), local_config(), &report);
  EXPECT_EQ(snap.size(), 137u);
  EXPECT_EQ(report.pages_fetched, 2u);
  EXPECT_EQ(report.records, 137u);
  EXPECT_TRUE(report.failures.empty());
  auto reqs = server.requests();
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_EQ(reqs[0].page, 1u);
  EXPECT_EQ(reqs[1].page, 2u);
  EXPECT_EQ(reqs[0].limit, 100u);
  EXPECT_EQ(snap.datasets()[0].category, "Parks & Recreation");
  EXPECT_EQ(snap.datasets()[1].category, "Économie locale");
  EXPECT_FALSE(snap.datasets()[3].category.has_value());  // empty label
  EXPECT_FALSE(snap.datasets()[4].category.has_value());  // no label
  EXPECT_EQ(snap.datasets()[1].created_at, "2017-07-15T02:40:00Z");
}

TEST(HarvestPortal, ExactMultipleStopsAtEmptyPage) {
  FixtureServer server(testing_support::paged_listing(testing_support::dataset_listing(200)));
  HarvestReport report;
  auto snap = harvest_portal(local_portal(server.domain()), local_config(), &report);
  EXPECT_EQ(snap.size(), 200u);
  EXPECT_EQ(report.pages_fetched, 2u);
  EXPECT_EQ(server.requests().size(), 3u);
}

TEST(HarvestPortal, SnapshotRoundTripsThroughFile) {
  FixtureServer server(testing_support::paged_listing(testing_support::dataset_listing(137)));
  auto snap = harvest_portal(local_portal(server.domain()), local_config());
  testing_support::TempDir dir;
  save_snapshot(snap, dir / "h.snapshot");
  EXPECT_EQ(load_snapshot(dir / "h.snapshot"), snap);
}

TEST(HarvestPortal, RetriesServerErrorsThenFails) {
  FixtureServer server([](const auto&, httplib::Response& res) { res.status = 503; });
  auto config = local_config();
  config.max_retries = 2;
  config.base_backoff = 20ms;
  HarvestReport report;
  auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(harvest_portal(local_portal(server.domain()), config, &report), PortalError);
  // Backoff before the two retries: 20 ms then 40 ms.
  EXPECT_GE(std::chrono::steady_clock::now() - start, 60ms);
  EXPECT_EQ(server.requests().size(), 3u);
  ASSERT_EQ(report.failures.size(), 3u);
  EXPECT_EQ(report.failures[2].attempt, 2);
  EXPECT_EQ(report.failures[0].error_class, "PortalError");
}

TEST(HarvestPortal, RecoversAfterTransientFailure) {
  std::atomic<int> calls{0};
  auto listing = testing_support::paged_listing(testing_support::dataset_listing(30));
  FixtureServer server([&](const testing_support::SeenRequest& req, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 429;
      return;
    }
    listing(req, res);
  });
  HarvestReport report;
  auto snap = harvest_portal(local_portal(server.domain()), local_config(), &report);
  EXPECT_EQ(snap.size(), 30u);
  EXPECT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(server.requests().size(), 2u);
}

TEST(HarvestPortal, ClientErrorsAreNotRetried) {
  FixtureServer server([](const auto&, httplib::Response& res) { res.status = 404; });
  try {
    harvest_portal(local_portal(server.domain()), local_config());
    FAIL() << "expected PortalError";
  } catch (const PortalError& e) {
    EXPECT_EQ(e.status(), 404);
  }
  EXPECT_EQ(server.requests().size(), 1u);
}

TEST(HarvestPortal, UnreachablePortalIsNetworkError) {
  auto config = local_config();
  config.max_retries = 2;
  HarvestReport report;
  EXPECT_THROW(harvest_portal(local_portal(testing_support::closed_domain()), config, &report),
               NetworkError);
  EXPECT_EQ(report.failures.size(), 3u);
  EXPECT_EQ(report.failures[0].error_class, "NetworkError");
}

TEST(HarvestPortal, RespectsRateLimit) {
  FixtureServer server(testing_support::paged_listing(testing_support::dataset_listing(137)));
  auto config = local_config();
  config.page_size = 10;
  config.rate_limit = 25;
  harvest_portal(local_portal(server.domain()), config);
  auto reqs = server.requests();
  ASSERT_EQ(reqs.size(), 14u);
  const double span = std::chrono::duration<double>(reqs.back().at - reqs.front().at).count();
  EXPECT_LE((reqs.size() - 1) / span, config.rate_limit);
}

TEST(HarvestPortal, SendsAppToken) {
  FixtureServer server(testing_support::paged_listing(testing_support::dataset_listing(3)));
  auto config = local_config();
  config.app_token = "secret-token";
  harvest_portal(local_portal(server.domain()), config);
  EXPECT_EQ(server.requests().at(0).app_token, "secret-token");
}

TEST(HarvestPortal, FiltersAssetsAndCountsMissingCounters) {
  json listing = json::array({
      {{"id", "a"}, {"assetType", "dataset"}, {"downloadCount", 4}, {"viewCount", 9}},
      {{"id", "b"}, {"assetType", "chart"}},
      {{"id", "c"}, {"assetType", "dataset"}},
      {{"id", "d"}, {"viewType", "tabular"}, {"displayType", "table"}, {"downloadCount", 1}},
      {{"id", "e"}, {"viewType", "href"}},
      {{"id", "f"}, {"viewType", "tabular"}, {"displayType", "map"}},
      {{"id", "g"}, {"modifyingViewUid", "a"}},
      {{"id", "a"}, {"assetType", "dataset"}, {"downloadCount", 4}, {"viewCount", 9}},
  });
  FixtureServer server(testing_support::paged_listing(listing));
  HarvestReport report;
  auto snap = harvest_portal(local_portal(server.domain()), local_config(), &report);
  ASSERT_EQ(snap.size(), 3u);
  EXPECT_EQ(snap.datasets()[1].id, "c");
  EXPECT_EQ(snap.datasets()[1].downloads, 0);
  EXPECT_EQ(report.skipped_assets, 4u);
  EXPECT_EQ(report.duplicate_ids, 1u);
  EXPECT_EQ(report.missing_downloads, 1u);
  EXPECT_EQ(report.missing_views, 2u);
}

TEST(HarvestPortal, MalformedListingIsSchemaError) {
  FixtureServer server([](const auto&, httplib::Response& res) {
    res.set_content(R"({"error":"nope"})", "application/json");
  });
  EXPECT_THROW(harvest_portal(local_portal(server.domain()), local_config()), SchemaError);
  HarvestReport report;
  EXPECT_THROW(parse_views_page(R"([{"id":"x","assetType":"dataset","downloadCount":-3}])", report),
               SchemaError);
  EXPECT_THROW(parse_views_page(R"([{"name":"no id"}])", report), SchemaError);
}

TEST(HarvestConfig, Validation) {
  auto c = local_config();
  c.page_size = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = local_config();
  c.rate_limit = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = local_config();
  c.max_retries = -1;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(HarvestConfig, AppTokenFromEnvironment) {
  ::setenv("HVD_SCOUT_APP_TOKEN", "abc", 1);
  EXPECT_EQ(app_token_from_env(), "abc");
  ::setenv("HVD_SCOUT_APP_TOKEN", "", 1);
  EXPECT_FALSE(app_token_from_env().has_value());
  ::unsetenv("HVD_SCOUT_APP_TOKEN");
}

TEST(RateLimiter, SpacesAcquisitions) {
  RateLimiter limiter(50);
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 6; ++i) limiter.acquire();
  EXPECT_GE(std::chrono::steady_clock::now() - start, 100ms);
  EXPECT_THROW(RateLimiter(0), InvalidArgument);
}

TEST(HarvestMany, IsolatesFailuresAndKeepsOrder) {
  FixtureServer server(testing_support::paged_listing(testing_support::dataset_listing(12)));
  std::vector<PortalSpec> specs{local_portal(testing_support::closed_domain(), "Down"),
                                local_portal(server.domain(), "Up")};
  auto config = local_config();
  config.max_retries = 1;
  auto outcomes = harvest_many(specs, config, 2);
  ASSERT_EQ(outcomes.size(), 2u);
  EXPECT_FALSE(outcomes[0].ok());
  EXPECT_EQ(outcomes[0].error_class, "NetworkError");
  EXPECT_TRUE(outcomes[0].error != nullptr);
  EXPECT_EQ(outcomes[0].report.portal.name, "Down");
  ASSERT_TRUE(outcomes[1].ok());
  EXPECT_EQ(outcomes[1].snapshot->size(), 12u);
}

TEST(HarvestMany, EmptyAndInvalid) {
  std::vector<PortalSpec> none;
  EXPECT_TRUE(harvest_many(none, local_config(), 4).empty());
  EXPECT_THROW(harvest_many(none, local_config(), 0), InvalidArgument);
}

TEST(HarvestInventory, KeyedByPortalName) {
  FixtureServer server(testing_support::paged_listing(testing_support::dataset_listing(12)));
  std::vector<PortalSpec> specs{local_portal(server.domain(), "Fixture City"),
                                local_portal(testing_support::closed_domain(), "Down")};
  auto config = local_config();
  config.max_retries = 0;
  std::vector<HarvestOutcome> failed;
  auto inv = harvest_inventory(specs, config, 2, &failed);
  ASSERT_EQ(inv.size(), 1u);
  EXPECT_EQ(inv.at("Fixture City"),
            (std::set<std::string>{"Parks & Recreation", "Économie locale", "Public Safety"}));
  ASSERT_EQ(failed.size(), 1u);
  EXPECT_EQ(failed[0].report.portal.name, "Down");
}
