#pragma once

#include <map>
#include <string>
#include <string_view>

#include "fppcm/distributions.hpp"

namespace fppcm {

/// key -> value pairs of one config section.
using ConfigSection = std::map<std::string, std::string>;
/// section name -> section; top-level keys live under "".
using ConfigDocument = std::map<std::string, ConfigSection>;

/// Plain-text config: `key = value` lines, `[section]` headers, `#`/`;` comments.
ConfigDocument parse_config(std::string_view text);
ConfigDocument read_config_file(const std::string& path);

/// Shortest round-trip decimal, never in exponent notation.
std::string format_decimal(double value);

/// "family = <name>" followed by one "<param> = <value>" line per parameter.
std::string to_config(const DegreeLaw& law);
std::string to_config(const ExcessWeightLaw& law);

DegreeLaw degree_law_from_section(const ConfigSection& section);
ExcessWeightLaw weight_law_from_section(const ConfigSection& section);

/// CLI form `family[:name=value,...]`, e.g. `exponential:rate=2`.
ExcessWeightLaw parse_weight_spec(std::string_view spec);

}  // namespace fppcm
