#pragma once

#include <stdexcept>
#include <string>

namespace gdf {

struct ParseError : std::runtime_error {
  explicit ParseError(size_t line, const std::string& what)
      : std::runtime_error("parse error at line " + std::to_string(line) + ": " + what),
        line(line) {}
  size_t line;
};

struct EmptyBatch : std::runtime_error {
  EmptyBatch() : std::runtime_error("log batch is empty") {}
};

struct AllMissing : std::runtime_error {
  explicit AllMissing(const std::string& field)
      : std::runtime_error("no valid sample for field '" + field + "'") {}
};

struct DegenerateDesign : std::runtime_error {
  explicit DegenerateDesign(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : std::runtime_error {
  explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientGrid : std::runtime_error {
  explicit InsufficientGrid(const std::string& what) : std::runtime_error(what) {}
};

struct Infeasible : std::runtime_error {
  explicit Infeasible(const std::string& what) : std::runtime_error("infeasible: " + what) {}
};

struct UnknownKey : std::runtime_error {
  explicit UnknownKey(const std::string& what) : std::runtime_error("unknown key: " + what) {}
};

struct NoHistory : std::runtime_error {
  explicit NoHistory(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownTransfer : std::runtime_error {
  explicit UnknownTransfer(const std::string& id)
      : std::runtime_error("unknown transfer '" + id + "'") {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gdf
