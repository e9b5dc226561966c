#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pchaos/point_process.hpp"

namespace pchaos {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flat `key = value` text grouped under `[section]` headers. Keys outside any
// section live in the section "".
class IniConfig {
 public:
  static IniConfig parse(std::istream& in);
  static IniConfig parse_string(const std::string& text);
  static IniConfig load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  double require_double(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  void erase(const std::string& section, const std::string& key);

  // Sorted `[section]` / `key = value` rendering; equal configs render equally.
  std::string canonical() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

std::uint64_t fnv1a64(const std::string& text);

// Builds a control measure from a section with keys
//   type = discrete | generalized_gamma | extended_gamma | beta
//   sizes, weights (discrete); sigma, gamma (generalized_gamma);
//   offset, coeff, power, floor (extended_gamma beta(x), beta c(x));
//   epsilon; time_lo, time_hi.
ControlMeasure control_from_config(const IniConfig& cfg, const std::string& section = "control");

}  // namespace pchaos
