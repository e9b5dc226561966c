#include "pchaos/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pchaos {

namespace {

double to_double(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' is not a number: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("key '" + key + "' is not a number: '" + v + "'");
  return d;
}

}  // namespace

IniConfig IniConfig::parse(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  IniConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      cfg.sections_[""][name] = node.data();
      continue;
    }
    auto& sec = cfg.sections_[name];
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError("nested keys are not supported: " + name + "." + key);
      sec[key] = leaf.data();
    }
  }
  return cfg;
}

IniConfig IniConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

IniConfig IniConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse(in);
}

bool IniConfig::has(const std::string& section, const std::string& key) const { return get(section, key).has_value(); }

bool IniConfig::has_section(const std::string& section) const { return sections_.count(section) > 0; }

std::optional<std::string> IniConfig::get(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string IniConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

double IniConfig::get_double(const std::string& section, const std::string& key, double fallback) const {
  const auto v = get(section, key);
  return v ? to_double(*v, key) : fallback;
}

double IniConfig::require_double(const std::string& section, const std::string& key) const {
  const auto v = get(section, key);
  if (!v) throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  return to_double(*v, key);
}

long long IniConfig::get_int(const std::string& section, const std::string& key, long long fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  const double d = to_double(*v, key);
  if (d != static_cast<double>(static_cast<long long>(d))) throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<long long>(d);
}

std::vector<double> IniConfig::get_list(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  const auto v = get(section, key);
  if (!v) return out;
  std::string item;
  std::istringstream in(*v);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty list entry in key '" + key + "'");
    out.push_back(to_double(item.substr(b, e - b + 1), key));
  }
  return out;
}

void IniConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

void IniConfig::erase(const std::string& section, const std::string& key) {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return;
  s->second.erase(key);
  if (s->second.empty()) sections_.erase(s);
}

std::string IniConfig::canonical() const {
  std::ostringstream os;
  for (const auto& [name, keys] : sections_) {
    if (!name.empty()) os << '[' << name << "]\n";
    for (const auto& [k, v] : keys) os << k << " = " << v << '\n';
  }
  return os.str();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t IniConfig::hash() const { return fnv1a64(canonical()); }

std::string IniConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

ControlMeasure control_from_config(const IniConfig& cfg, const std::string& section) {
  if (!cfg.has_section(section)) throw ConfigError("missing section [" + section + "]");
  const std::string type = cfg.get_string(section, "type", "");
  const Interval time{cfg.get_double(section, "time_lo", -kInf), cfg.get_double(section, "time_hi", kInf)};
  const double eps = cfg.get_double(section, "epsilon", 1e-4);
  auto law = [&](double offset, double coeff, double power, double floor) {
    return PowerLaw{cfg.get_double(section, "offset", offset), cfg.get_double(section, "coeff", coeff),
                    cfg.get_double(section, "power", power), cfg.get_double(section, "floor", floor)};
  };
  try {
    if (type == "discrete") {
      std::vector<double> sizes = cfg.get_list(section, "sizes");
      std::vector<double> weights = cfg.get_list(section, "weights");
      if (weights.empty()) weights.assign(sizes.size(), 1.0 / static_cast<double>(sizes.size()));
      return ControlMeasure::discrete(std::move(sizes), std::move(weights), time);
    }
    if (type == "generalized_gamma")
      return ControlMeasure::generalized_gamma(cfg.get_double(section, "sigma", 0.5),
                                               cfg.get_double(section, "gamma", 1.0), eps, time);
    const Interval half{cfg.get_double(section, "time_lo", 0.0), cfg.get_double(section, "time_hi", kInf)};
    if (type == "extended_gamma") return ControlMeasure::extended_gamma(law(1.0, 0.0, 1.0, 0.0), eps, half);
    if (type == "beta") return ControlMeasure::beta(law(1.0, 0.0, 1.0, 0.0), eps, half);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid control in [" + section + "]: " + e.what());
  }
  throw ConfigError("unknown control type '" + type + "' in [" + section + "]");
}

}  // namespace pchaos
