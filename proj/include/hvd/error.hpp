#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hvd {

// Root of every error thrown by the library. The class name is the error
// kind; what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// --- statistics -------------------------------------------------------------

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("empty input") {}
  using Error::Error;
};

class QOutOfRange : public Error {
 public:
  explicit QOutOfRange(double q)
      : Error("quantile level out of range [0,1]: " + std::to_string(q)) {}
};

class NegativeValue : public Error {
 public:
  explicit NegativeValue(long long v)
      : Error("negative count: " + std::to_string(v)) {}
};

// --- catalog / snapshots ----------------------------------------------------

class EmptySnapshot : public Error {
 public:
  EmptySnapshot() : Error("snapshot has no datasets") {}
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(std::string source, std::size_t line, const std::string& detail)
      : Error(source + ":" + std::to_string(line) + ": " + detail),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// --- harvesting -------------------------------------------------------------

class NetworkError : public Error {
 public:
  using Error::Error;
};

class PortalError : public Error {
 public:
  PortalError(int status, const std::string& detail)
      : Error("HTTP " + std::to_string(status) + ": " + detail), status_(status) {}

  int status() const { return status_; }

 private:
  int status_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// --- taxonomy / similarity --------------------------------------------------

class MissingFile : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t offset, const std::string& detail)
      : Error(file + " @" + std::to_string(offset) + ": " + detail),
        file_(std::move(file)),
        offset_(offset) {}

  const std::string& file() const { return file_; }
  std::size_t byte_offset() const { return offset_; }

 private:
  std::string file_;
  std::size_t offset_;
};

class CycleDetected : public Error {
 public:
  using Error::Error;
};

class UnknownSynset : public Error {
 public:
  using Error::Error;
};

class UnknownMetric : public Error {
 public:
  using Error::Error;
};

class EmptyAfterTokenization : public Error {
 public:
  explicit EmptyAfterTokenization(const std::string& label)
      : Error("category has no content words: '" + label + "'"), label_(label) {}

  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// --- categorization / index -------------------------------------------------

class EmptyInventory : public Error {
 public:
  EmptyInventory() : Error("category inventory is empty") {}
};

class EmptyCategory : public Error {
 public:
  using Error::Error;
};

class InvalidTotal : public Error {
 public:
  using Error::Error;
};

class EmptyPool : public Error {
 public:
  EmptyPool() : Error("portal pool has no datasets") {}
};

class DanglingAlignment : public Error {
 public:
  DanglingAlignment(std::string portal, std::string label, const std::string& why)
      : Error("alignment references unknown category '" + label + "' of portal '" +
              portal + "': " + why),
        portal_(std::move(portal)),
        label_(std::move(label)) {}

  const std::string& portal() const { return portal_; }
  const std::string& label() const { return label_; }

 private:
  std::string portal_;
  std::string label_;
};

// --- reporting --------------------------------------------------------------

class EmptyData : public Error {
 public:
  EmptyData() : Error("chart has no data rows") {}
  using Error::Error;
};

class UnknownKey : public Error {
 public:
  using Error::Error;
};

}  // namespace hvd
