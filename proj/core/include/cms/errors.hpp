#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cms {

// Base of every domain error. `module()` names the subsystem that raised it
// so the CLI can report the origin.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

struct MissingParam : Error {
  explicit MissingParam(const std::string& what) : Error("model", what) {}
};

struct DegenerateWidth : Error {
  explicit DegenerateWidth(const std::string& what) : Error("model", what) {}
};

// Malformed table file; carries the 1-based line when known.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line = 0)
      : Error("dataset", line ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  std::size_t line = 0;
};

// Structurally valid file that does not match the expected column set.
struct SchemaError : Error {
  SchemaError(const std::string& what, std::vector<std::string> missing = {})
      : Error("dataset", what), missing_columns(std::move(missing)) {}
  std::vector<std::string> missing_columns;
};

struct DegenerateDistribution : Error {
  explicit DegenerateDistribution(const std::string& what) : Error("normalize", what) {}
};

struct GridMismatch : Error {
  explicit GridMismatch(const std::string& what) : Error("normalize", what) {}
};

struct WeightError : Error {
  explicit WeightError(const std::string& what) : Error("mitigate", what) {}
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& what) : Error("predict", what) {}
};

struct UnknownKpi : Error {
  explicit UnknownKpi(const std::string& what) : Error("detect", what) {}
};

struct EmptyInput : Error {
  explicit EmptyInput(const std::string& what) : Error("mitigate", what) {}
};

struct PolicyError : Error {
  explicit PolicyError(const std::string& what) : Error("mitigate", what) {}
};

struct FixtureMissing : Error {
  explicit FixtureMissing(const std::string& what) : Error("harness", what) {}
};

// Invalid scenario / store / solver configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what, std::string module = "config")
      : Error(std::move(module), what) {}
};

}  // namespace cms
