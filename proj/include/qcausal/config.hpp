#pragma once

// Flat `key = value` configuration documents for HardwareParams.
//
//   # comment
//   a = 1e-6
//   lambda = 1.0, 0.5
//
// Keys are the HardwareParams field names. `nu` defaults to the number of
// couplings and `c_max` to the speed of light; every other key is required.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qcausal/params.hpp"

namespace qcausal {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, std::string_view key) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError("invalid number '" + std::string(text) + "' for key '" + std::string(key) + "'");
  return value;
}

inline int parse_int(std::string_view text, std::string_view key) {
  text = trim(text);
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError("invalid integer '" + std::string(text) + "' for key '" + std::string(key) + "'");
  return value;
}

}  // namespace detail

/// Parses a comma-separated list of numbers.
inline std::vector<double> parse_number_list(std::string_view text, std::string_view key = "lambda") {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(detail::parse_double(text.substr(0, comma), key));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

/// Parses and validates a configuration document.
inline HardwareParams parse_config(std::string_view document) {
  static const std::set<std::string, std::less<>> known{"a", "delta_t", "g1", "g2", "lambda",
                                                        "m", "d", "nu", "c_max"};
  std::map<std::string, std::string, std::less<>> entries;
  std::istringstream in{std::string(document)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key{detail::trim(view.substr(0, eq))};
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "'");
    if (entries.contains(key)) throw ConfigError("duplicate key '" + key + "'");
    entries.emplace(std::move(key), std::string(detail::trim(view.substr(eq + 1))));
  }

  auto require = [&](std::string_view key) -> const std::string& {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("missing key '" + std::string(key) + "'");
    return it->second;
  };

  HardwareParams p;
  p.a = detail::parse_double(require("a"), "a");
  p.delta_t = detail::parse_double(require("delta_t"), "delta_t");
  p.g1 = detail::parse_double(require("g1"), "g1");
  p.g2 = detail::parse_double(require("g2"), "g2");
  p.lambda = parse_number_list(require("lambda"));
  p.m = detail::parse_double(require("m"), "m");
  p.d = detail::parse_int(require("d"), "d");
  p.nu = entries.contains("nu") ? detail::parse_int(entries.find("nu")->second, "nu")
                                : static_cast<int>(p.lambda.size());
  if (entries.contains("c_max")) p.c_max = detail::parse_double(entries.find("c_max")->second, "c_max");
  validate(p);
  return p;
}

inline HardwareParams load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

/// Serializes `p` in the same format `parse_config` reads.
inline std::string format_config(const HardwareParams& p) {
  std::ostringstream out;
  out.precision(17);
  out << "a = " << p.a << "\n"
      << "delta_t = " << p.delta_t << "\n"
      << "g1 = " << p.g1 << "\n"
      << "g2 = " << p.g2 << "\n"
      << "lambda = ";
  for (std::size_t j = 0; j < p.lambda.size(); ++j) out << (j ? ", " : "") << p.lambda[j];
  out << "\n"
      << "m = " << p.m << "\n"
      << "d = " << p.d << "\n"
      << "nu = " << p.nu << "\n"
      << "c_max = " << p.c_max << "\n";
  return out.str();
}

}  // namespace qcausal
