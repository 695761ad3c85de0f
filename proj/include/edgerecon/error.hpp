#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgerecon {

/// Invalid parameters or configuration. `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Base for problems with trace files (cameras.csv, servers.csv, quality traces).
class TraceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A cell or line that does not parse. Carries the 1-based line number.
class ParseError : public TraceError {
public:
  ParseError(std::string path, std::size_t line, const std::string& what)
      : TraceError(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)), line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string path_;
  std::size_t line_;
};

/// Well-formed file whose shape does not match what was expected.
class SchemaError : public TraceError {
public:
  using TraceError::TraceError;
};

/// A precondition the caller was responsible for was broken.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Out-of-range frame or server index.
class BoundsError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

namespace detail {
inline void require(bool ok, const char* what) {
  if (!ok) throw ContractViolation(what);
}
}  // namespace detail

}  // namespace edgerecon
