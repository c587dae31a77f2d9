#include "fppcm/law_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace fppcm {

namespace {

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument(fmt::format("config: '{}' is not a number for '{}'", text, key));
  return v;
}

double require(const ConfigSection& s, const std::string& key) {
  auto it = s.find(key);
  if (it == s.end()) throw std::invalid_argument(fmt::format("config: missing '{}'", key));
  return parse_real(key, it->second);
}

double optional_real(const ConfigSection& s, const std::string& key, double fallback) {
  auto it = s.find(key);
  return it == s.end() ? fallback : parse_real(key, it->second);
}

std::string trim(std::string_view v) {
  const auto b = v.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = v.find_last_not_of(" \t\r\n");
  return std::string(v.substr(b, e - b + 1));
}

}  // namespace

ConfigDocument parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(fmt::format("config: {}", e.message()));
  }
  ConfigDocument doc;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      doc[""][key] = trim(node.data());
    } else {
      auto& section = doc[key];
      for (const auto& [k, v] : node) section[k] = trim(v.data());
    }
  }
  return doc;
}

ConfigDocument read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(fmt::format("config: cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_decimal(double value) {
  std::string s = fmt::format("{}", value);
  if (s.find_first_of("eE") == std::string::npos || !std::isfinite(value)) return s;
  const int exponent = static_cast<int>(std::floor(std::log10(std::abs(value))));
  const int precision = std::max(0, 16 - exponent);
  s = fmt::format("{:.{}f}", value, precision);
  if (s.find('.') != std::string::npos) {
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

std::string to_config(const DegreeLaw& law) {
  std::string out;
  switch (law.family()) {
    case DegreeFamily::PurePower:
    case DegreeFamily::CorrectedPower:
      out += fmt::format("family = {}\n",
                         law.family() == DegreeFamily::PurePower ? "pure-power" : "corrected-power");
      out += fmt::format("tau = {}\ngamma = {}\nC = {}\n", format_decimal(law.tau()),
                         format_decimal(law.gamma()), format_decimal(law.C()));
      break;
    case DegreeFamily::Table:
      out += "family = table\n";
      for (auto [k, p] : law.table_pmf()) out += fmt::format("d{} = {}\n", k, format_decimal(p));
      break;
  }
  return out;
}

std::string to_config(const ExcessWeightLaw& law) {
  std::string out = fmt::format("family = {}\n", law.name());
  for (const auto& [k, v] : law.parameters()) out += fmt::format("{} = {}\n", k, format_decimal(v));
  return out;
}

DegreeLaw degree_law_from_section(const ConfigSection& section) {
  auto it = section.find("family");
  const std::string family = it == section.end() ? "pure-power" : it->second;
  if (family == "pure-power")
    return DegreeLaw::pure_power(require(section, "tau"), optional_real(section, "gamma", 0.5),
                                 optional_real(section, "C", 1.0));
  if (family == "corrected-power")
    return DegreeLaw::corrected_power(require(section, "tau"), require(section, "gamma"),
                                      require(section, "C"));
  if (family == "table") {
    std::map<std::int64_t, double> pmf;
    for (const auto& [k, v] : section) {
      if (k == "family") continue;
      if (k.size() < 2 || k[0] != 'd')
        throw std::invalid_argument(fmt::format("config: unexpected degree-table key '{}'", k));
      pmf[std::stoll(k.substr(1))] = parse_real(k, v);
    }
    return DegreeLaw::table(std::move(pmf));
  }
  throw std::invalid_argument(fmt::format("config: unknown degree family '{}'", family));
}

ExcessWeightLaw weight_law_from_section(const ConfigSection& section) {
  auto it = section.find("family");
  if (it == section.end()) throw std::invalid_argument("config: weight section needs 'family'");
  const std::string& family = it->second;
  if (family == "zero") return ExcessWeightLaw::zero();
  if (family == "uniform01") return ExcessWeightLaw::uniform01();
  if (family == "exponential") return ExcessWeightLaw::exponential(optional_real(section, "rate", 1.0));
  if (family == "power") return ExcessWeightLaw::power(require(section, "beta"));
  if (family == "double-exponential")
    return ExcessWeightLaw::double_exponential(optional_real(section, "upper", 1.0));
  if (family == "table") {
    std::vector<std::pair<double, double>> knots;
    for (std::size_t j = 0;; ++j) {
      const std::string xk = fmt::format("x{}", j);
      if (!section.contains(xk)) break;
      knots.emplace_back(require(section, xk), require(section, fmt::format("F{}", j)));
    }
    return ExcessWeightLaw::table(std::move(knots));
  }
  throw std::invalid_argument(fmt::format("config: unknown weight family '{}'", family));
}

ExcessWeightLaw parse_weight_spec(std::string_view spec) {
  ConfigSection section;
  const auto colon = spec.find(':');
  section["family"] = trim(spec.substr(0, colon));
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos)
        throw std::invalid_argument(fmt::format("weight spec: expected name=value in '{}'", item));
      section[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return weight_law_from_section(section);
}

}  // namespace fppcm
