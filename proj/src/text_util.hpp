#pragma once

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gdf/errors.hpp"

namespace gdf::text {

inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, ptr};
}

inline double parse_double(const std::string& s, size_t line_no = 0) {
  if (s == "nan") return std::nan("");
  double out;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(line_no, "bad number '" + s + "'");
  return out;
}

inline int64_t parse_int(const std::string& s, size_t line_no = 0) {
  int64_t out;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(line_no, "bad integer '" + s + "'");
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream in(s);
  while (std::getline(in, tok, sep)) out.push_back(tok);
  return out;
}

/// Pulls the value of a `key=value` token sequence; throws when absent.
class KvLine {
 public:
  explicit KvLine(const std::string& line, size_t line_no = 0) : line_no_(line_no) {
    for (const auto& tok : split_ws(line)) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw ParseError(line_no, "expected key=value, got '" + tok + "'");
      kv_.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
  }

  const std::string& str(const std::string& key) const {
    for (const auto& [k, v] : kv_)
      if (k == key) return v;
    throw ParseError(line_no_, "missing field '" + key + "'");
  }
  double num(const std::string& key) const { return parse_double(str(key), line_no_); }
  int64_t integer(const std::string& key) const { return parse_int(str(key), line_no_); }

 private:
  static std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  }
  std::vector<std::pair<std::string, std::string>> kv_;
  size_t line_no_;
};

}  // namespace gdf::text
