#include "hvd/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "hvd/category_sets.hpp"
#include "hvd/error.hpp"

namespace hvd {

namespace {

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                    "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};
constexpr const char* kFont = "font-family=\"Helvetica, Arial, sans-serif\"";

std::string px(double v) { return format_fixed(v, 2); }

std::string shortest(double v) {
  if (v == 0) v = 0;
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : "0";
}

std::string tick_label(double v) {
  if (std::fabs(v - std::round(v)) < 1e-9) return format_fixed(std::round(v), 0);
  return format_fixed(v, 1);
}

std::size_t label_chars(const std::vector<std::string>& labels) {
  std::size_t n = 0;
  for (const auto& l : labels) {
    std::size_t c = 0;
    for (unsigned char ch : l)
      if ((ch & 0xC0) != 0x80) ++c;
    n = std::max(n, c);
  }
  return n;
}

class SvgWriter {
 public:
  SvgWriter(double width, double height) : width_(width), height_(height) {}

  void raw(const std::string& s) { body_ += s; }
  void text(double x, double y, std::string_view content, const std::string& extra = "") {
    body_ += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" " + kFont + " font-size=\"11\"" +
             (extra.empty() ? "" : " " + extra) + ">" + xml_escape(content) + "</text>\n";
  }
  void line(double x1, double y1, double x2, double y2, const std::string& extra) {
    body_ += "<line x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) + "\" y2=\"" +
             px(y2) + "\" " + extra + "/>\n";
  }

  std::string finish() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width_) + "\" height=\"" +
           px(height_) + "\" viewBox=\"0 0 " + px(width_) + " " + px(height_) + "\">\n";
    out += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + px(width_) + "\" height=\"" +
           px(height_) + "\" fill=\"#ffffff\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
  }

 private:
  double width_, height_;
  std::string body_;
};

void bar(SvgWriter& w, double x, double y, double width, double height, const std::string& row,
         const std::string& series, double value, const char* color) {
  w.raw("<rect class=\"bar\" data-row=\"" + xml_escape(row) + "\" data-series=\"" +
        xml_escape(series) + "\" data-value=\"" + shortest(value) + "\" x=\"" + px(x) + "\" y=\"" +
        px(y) + "\" width=\"" + px(width) + "\" height=\"" + px(height) + "\" fill=\"" + color +
        "\"/>\n");
}

double value_max(const ChartSpec& spec) {
  if (spec.axis_max) return *spec.axis_max > 0 ? *spec.axis_max : 1.0;
  double m = 0;
  for (const auto& r : spec.values)
    for (double v : r) m = std::max(m, v);
  return m > 0 ? m : 1.0;
}

void check_values(const ChartSpec& spec, std::size_t series) {
  if (spec.row_labels.empty()) throw EmptyData();
  if (spec.values.size() != spec.row_labels.size())
    throw InvalidArgument("chart has " + std::to_string(spec.values.size()) + " value rows for " +
                          std::to_string(spec.row_labels.size()) + " labels");
  for (const auto& r : spec.values) {
    if (r.size() != series) throw InvalidArgument("inconsistent series length in chart data");
    for (double v : r)
      if (!std::isfinite(v) || v < 0) throw InvalidArgument("chart values must be finite and >= 0");
  }
}

std::string render_grouped(const ChartSpec& spec) {
  const std::size_t ns = std::max<std::size_t>(1, spec.series.size());
  check_values(spec, ns);
  const double bar_w = 18, gap = 24, left = 70, right = 20, top = 70, plot_h = 300, bottom = 60;
  const double group_w = ns * bar_w + gap;
  const double plot_w = group_w * spec.row_labels.size();
  const double width = std::max(left + plot_w + right, 360.0);
  const double height = top + plot_h + bottom;
  const double ymax = value_max(spec);
  SvgWriter w(width, height);
  w.text(left, 22, spec.title, "class=\"title\" font-size=\"14\" font-weight=\"bold\"");

  for (std::size_t s = 0; s < ns; ++s) {
    const double lx = left + 110.0 * s;
    w.raw("<rect class=\"legend\" x=\"" + px(lx) + "\" y=\"34\" width=\"10\" height=\"10\" fill=\"" +
          kPalette[s % 8] + "\"/>\n");
    w.text(lx + 14, 43, s < spec.series.size() ? spec.series[s] : "");
  }

  const double y0 = top + plot_h;
  w.line(left, top, left, y0, "class=\"axis\" stroke=\"#333333\"");
  w.line(left, y0, left + plot_w, y0, "class=\"axis\" stroke=\"#333333\"");
  for (int i = 0; i <= 5; ++i) {
    const double v = ymax * i / 5.0;
    const double y = y0 - plot_h * i / 5.0;
    w.line(left - 4, y, left, y, "class=\"tick\" stroke=\"#333333\"");
    w.text(left - 8, y + 4, tick_label(v), "text-anchor=\"end\"");
  }
  for (std::size_t r = 0; r < spec.row_labels.size(); ++r) {
    const double gx = left + group_w * r + gap / 2;
    for (std::size_t s = 0; s < ns; ++s) {
      const double v = spec.values[r][s];
      const double h = v / ymax * plot_h;
      bar(w, gx + bar_w * s, y0 - h, bar_w - 2, h, spec.row_labels[r],
          s < spec.series.size() ? spec.series[s] : "", v, kPalette[s % 8]);
    }
    w.text(gx + (ns * bar_w) / 2, y0 + 16, spec.row_labels[r], "text-anchor=\"middle\"");
  }
  if (!spec.x_label.empty()) w.text(left + plot_w / 2, height - 14, spec.x_label, "text-anchor=\"middle\"");
  if (!spec.y_label.empty())
    w.text(16, top + plot_h / 2, spec.y_label,
           "text-anchor=\"middle\" transform=\"rotate(-90 16 " + px(top + plot_h / 2) + ")\"");
  return w.finish();
}

std::string render_horizontal(const ChartSpec& spec) {
  check_values(spec, 1);
  const double label_w = std::clamp(7.0 * label_chars(spec.row_labels) + 12, 80.0, 340.0);
  const double row_h = 22, thick = 16, top = 44, plot_w = 480, bubble = spec.value_bubbles ? 70 : 40;
  const double width = label_w + plot_w + bubble + 20;
  const double height = top + row_h * spec.row_labels.size() + 50;
  const double xmax = value_max(spec);
  SvgWriter w(width, height);
  w.text(10, 22, spec.title, "class=\"title\" font-size=\"14\" font-weight=\"bold\"");
  const double x0 = label_w;
  const double y_end = top + row_h * spec.row_labels.size();
  w.line(x0, top, x0, y_end, "class=\"axis\" stroke=\"#333333\"");
  const char* color = spec.kind == ChartKind::coverage_bars ? kPalette[2] : kPalette[0];
  for (std::size_t r = 0; r < spec.row_labels.size(); ++r) {
    const double v = spec.values[r][0];
    const double len = v / xmax * plot_w;
    const double y = top + row_h * r + (row_h - thick) / 2;
    w.text(x0 - 6, y + thick - 4, spec.row_labels[r], "text-anchor=\"end\"");
    bar(w, x0, y, len, thick, spec.row_labels[r], spec.series.empty() ? "" : spec.series[0], v, color);
    if (spec.value_bubbles) {
      const double cx = x0 + len + 22, cy = y + thick / 2;
      w.raw("<g class=\"bubble\"><ellipse cx=\"" + px(cx) + "\" cy=\"" + px(cy) +
            "\" rx=\"20\" ry=\"9\" fill=\"#fde9c9\" stroke=\"#f28e2b\"/>");
      w.raw("<text x=\"" + px(cx) + "\" y=\"" + px(cy + 4) + "\" " + kFont +
            " font-size=\"10\" text-anchor=\"middle\">" + xml_escape(format_fixed(v, 0)) +
            "</text></g>\n");
    } else if (spec.kind == ChartKind::coverage_bars) {
      w.text(x0 + len + 6, y + thick - 4, format_fixed(v, 0));
    }
  }
  for (int i = 0; i <= 4; ++i) {
    const double x = x0 + plot_w * i / 4.0;
    w.line(x, y_end, x, y_end + 4, "class=\"tick\" stroke=\"#333333\"");
    w.text(x, y_end + 16, tick_label(xmax * i / 4.0), "text-anchor=\"middle\"");
  }
  if (!spec.x_label.empty()) w.text(x0 + plot_w / 2, height - 10, spec.x_label, "text-anchor=\"middle\"");
  return w.finish();
}

std::string render_boxes(const ChartSpec& spec) {
  if (spec.row_labels.empty()) throw EmptyData();
  if (spec.boxes.size() != spec.row_labels.size())
    throw InvalidArgument("boxplot needs one box per category");
  auto f = [&](double v) { return spec.log_scale ? std::log10(1.0 + v) : v; };
  double vmax = 0;
  for (const auto& b : spec.boxes) {
    vmax = std::max(vmax, f(b.p95));
    for (double o : b.outliers) vmax = std::max(vmax, f(o));
  }
  if (vmax <= 0) vmax = 1;
  const double col_w = 44, left = 70, top = 44, plot_h = 320;
  const double label_h = std::min(7.0 * label_chars(spec.row_labels), 220.0) + 20;
  const double plot_w = col_w * spec.row_labels.size();
  const double width = std::max(left + plot_w + 20, 360.0);
  const double height = top + plot_h + label_h;
  const double y0 = top + plot_h;
  auto y_of = [&](double v) { return y0 - f(v) / vmax * plot_h; };

  SvgWriter w(width, height);
  w.text(left, 22, spec.title, "class=\"title\" font-size=\"14\" font-weight=\"bold\"");
  w.line(left, top, left, y0, "class=\"axis\" stroke=\"#333333\"");
  w.line(left, y0, left + plot_w, y0, "class=\"axis\" stroke=\"#333333\"");
  for (int i = 0; i <= 5; ++i) {
    const double fv = vmax * i / 5.0;
    const double shown = spec.log_scale ? std::pow(10.0, fv) - 1.0 : fv;
    const double y = y0 - plot_h * i / 5.0;
    w.line(left - 4, y, left, y, "class=\"tick\" stroke=\"#333333\"");
    w.text(left - 8, y + 4, format_fixed(shown, 0), "text-anchor=\"end\"");
  }
  for (std::size_t r = 0; r < spec.row_labels.size(); ++r) {
    const auto& b = spec.boxes[r];
    const double cx = left + col_w * r + col_w / 2;
    const double bw = col_w * 0.6;
    const std::string row = xml_escape(spec.row_labels[r]);
    w.line(cx, y_of(b.p5), cx, y_of(b.q1),
           "class=\"whisker\" data-row=\"" + row + "\" data-value=\"" + shortest(b.p5) + "\" stroke=\"#333333\"");
    w.line(cx, y_of(b.q3), cx, y_of(b.p95),
           "class=\"whisker\" data-row=\"" + row + "\" data-value=\"" + shortest(b.p95) + "\" stroke=\"#333333\"");
    w.line(cx - bw / 4, y_of(b.p5), cx + bw / 4, y_of(b.p5), "class=\"cap\" stroke=\"#333333\"");
    w.line(cx - bw / 4, y_of(b.p95), cx + bw / 4, y_of(b.p95), "class=\"cap\" stroke=\"#333333\"");
    const double ytop = y_of(b.q3), ybot = y_of(b.q1);
    w.raw("<rect class=\"box\" data-row=\"" + row + "\" data-q1=\"" + shortest(b.q1) + "\" data-q3=\"" +
          shortest(b.q3) + "\" x=\"" + px(cx - bw / 2) + "\" y=\"" + px(ytop) + "\" width=\"" + px(bw) +
          "\" height=\"" + px(ybot - ytop) + "\" fill=\"#a0cbe8\" stroke=\"#4e79a7\"/>\n");
    w.line(cx - bw / 2, y_of(b.median), cx + bw / 2, y_of(b.median),
           "class=\"median\" data-row=\"" + row + "\" data-value=\"" + shortest(b.median) +
               "\" stroke=\"#e15759\" stroke-width=\"2\"");
    for (double o : b.outliers) {
      const double y = y_of(o);
      w.raw("<path class=\"outlier\" data-row=\"" + row + "\" data-value=\"" + shortest(o) + "\" d=\"M" +
            px(cx - 3) + " " + px(y - 3) + " L" + px(cx + 3) + " " + px(y + 3) + " M" + px(cx - 3) + " " +
            px(y + 3) + " L" + px(cx + 3) + " " + px(y - 3) + "\" stroke=\"#333333\"/>\n");
    }
    const double ly = y0 + 12;
    w.text(cx, ly, spec.row_labels[r],
           "text-anchor=\"end\" transform=\"rotate(-45 " + px(cx) + " " + px(ly) + ")\"");
  }
  if (!spec.y_label.empty())
    w.text(16, top + plot_h / 2, spec.y_label,
           "text-anchor=\"middle\" transform=\"rotate(-90 16 " + px(top + plot_h / 2) + ")\"");
  return w.finish();
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') out += ' ';
        else out += c;
    }
  }
  return out;
}

BoxStats box_stats(std::span<const std::int64_t> values) {
  if (values.empty()) throw EmptyCategory("boxplot category has no values");
  auto sorted = sorted_copy(values);
  BoxStats b;
  b.p5 = percentile_sorted(sorted, 0.05);
  b.q1 = percentile_sorted(sorted, 0.25);
  b.median = percentile_sorted(sorted, 0.5);
  b.q3 = percentile_sorted(sorted, 0.75);
  b.p95 = percentile_sorted(sorted, 0.95);
  for (auto v : sorted) {
    const auto d = static_cast<double>(v);
    if (d < b.p5 || d > b.p95) b.outliers.push_back(d);
  }
  return b;
}

std::string render_svg(const ChartSpec& spec) {
  switch (spec.kind) {
    case ChartKind::grouped_bars: return render_grouped(spec);
    case ChartKind::ordered_bars:
    case ChartKind::coverage_bars: return render_horizontal(spec);
    case ChartKind::boxplot: return render_boxes(spec);
  }
  throw InvalidArgument("unknown chart kind");
}

void write_svg(const ChartSpec& spec, const std::filesystem::path& path) {
  write_text_file(path, render_svg(spec));
}

ChartSpec render_distribution(std::span<const DistributionSeries> series, std::string title) {
  if (series.empty()) throw EmptyData();
  ChartSpec spec;
  spec.kind = ChartKind::grouped_bars;
  spec.title = std::move(title);
  spec.x_label = "downloads/views per dataset";
  spec.y_label = "% of datasets";
  spec.axis_max = 100.0;
  for (const auto& s : series) spec.series.push_back(s.label);
  for (std::size_t k = 0; k < kDistributionClasses; ++k) {
    spec.row_labels.emplace_back(DistributionHistogram::class_label(k));
    std::vector<double> row;
    for (const auto& s : series) row.push_back(s.histogram.percentages()[k]);
    spec.values.push_back(std::move(row));
  }
  return spec;
}

OrderingKey parse_ordering_key(std::string_view name) {
  for (auto k : {OrderingKey::datasets, OrderingKey::downloads, OrderingKey::mean,
                 OrderingKey::median, OrderingKey::hvdi})
    if (ordering_key_name(k) == name) return k;
  throw UnknownKey("unknown ordering key '" + std::string(name) +
                   "' (datasets, downloads, mean, median, hvdi)");
}

std::string_view ordering_key_name(OrderingKey key) {
  switch (key) {
    case OrderingKey::datasets: return "datasets";
    case OrderingKey::downloads: return "downloads";
    case OrderingKey::mean: return "mean";
    case OrderingKey::median: return "median";
    case OrderingKey::hvdi: return "hvdi";
  }
  throw UnknownKey("unknown ordering key");
}

ChartSpec render_category_bars(std::span<const CategoryMetrics> rows, OrderingKey key,
                               std::string title, bool include_unspecified) {
  auto value = [key](const CategoryMetrics& m) -> double {
    switch (key) {
      case OrderingKey::datasets: return static_cast<double>(m.n_datasets);
      case OrderingKey::downloads: return static_cast<double>(m.downloads);
      case OrderingKey::mean: return m.mean;
      case OrderingKey::median: return m.median;
      case OrderingKey::hvdi: return m.hvdi;
    }
    throw UnknownKey("unknown ordering key");
  };
  std::vector<const CategoryMetrics*> kept;
  for (const auto& r : rows)
    if (!r.unspecified || (include_unspecified && key == OrderingKey::datasets)) kept.push_back(&r);
  if (kept.empty()) throw EmptyData();
  std::sort(kept.begin(), kept.end(), [&](const CategoryMetrics* a, const CategoryMetrics* b) {
    const double va = value(*a), vb = value(*b);
    if (va != vb) return va > vb;
    return a->label < b->label;
  });
  ChartSpec spec;
  spec.kind = ChartKind::ordered_bars;
  spec.title = std::move(title);
  spec.series = {std::string(ordering_key_name(key))};
  spec.x_label = std::string(ordering_key_name(key));
  spec.value_bubbles = key == OrderingKey::hvdi;
  for (const auto* r : kept) {
    spec.row_labels.push_back(r->label);
    spec.values.push_back({value(*r)});
  }
  return spec;
}

ChartSpec render_boxplot(std::span<const std::pair<std::string, std::vector<std::int64_t>>> categories,
                         std::string title) {
  if (categories.empty()) throw EmptyData();
  ChartSpec spec;
  spec.kind = ChartKind::boxplot;
  spec.title = std::move(title);
  spec.y_label = "downloads";
  spec.log_scale = true;
  for (const auto& [label, values] : categories) {
    if (values.empty()) throw EmptyCategory("category '" + label + "' has no datasets");
    spec.row_labels.push_back(label);
    spec.boxes.push_back(box_stats(values));
  }
  return spec;
}

ChartSpec render_coverage(std::span<const std::pair<std::string, std::size_t>> counts,
                          std::string title, std::string x_label) {
  if (counts.empty()) throw EmptyData();
  ChartSpec spec;
  spec.kind = ChartKind::coverage_bars;
  spec.title = std::move(title);
  spec.series = {"portals"};
  spec.x_label = std::move(x_label);
  for (const auto& [label, n] : counts) {
    spec.row_labels.push_back(label);
    spec.values.push_back({static_cast<double>(n)});
  }
  return spec;
}

ChartSpec render_ordered_values(std::span<const std::pair<std::string, double>> values,
                                std::string title, std::string x_label, bool bubbles) {
  if (values.empty()) throw EmptyData();
  ChartSpec spec;
  spec.kind = ChartKind::ordered_bars;
  spec.title = std::move(title);
  spec.series = {x_label};
  spec.x_label = std::move(x_label);
  spec.value_bubbles = bubbles;
  for (const auto& [label, v] : values) {
    spec.row_labels.push_back(label);
    spec.values.push_back({v});
  }
  return spec;
}

}  // namespace hvd
