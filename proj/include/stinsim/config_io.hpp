#pragma once

// Flat `section.key = value` configuration files. Every key accepted on the
// command line via `--set key=value` is a file key and vice versa. Values of
// unit-bearing keys may carry their unit ("46 dBm"); a different unit is
// rejected. Writing emits every key, so parse(write(c)) == c.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stinsim/engine.hpp"
#include "stinsim/error.hpp"
#include "stinsim/experiment_config.hpp"

namespace stinsim {

using KeyValue = std::pair<std::string, std::string>;

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Unit implied by a key's suffix; empty for dimensionless keys.
inline std::string_view unit_of(std::string_view key) {
  static constexpr std::pair<std::string_view, std::string_view> kSuffixes[] = {
      {"_per_km2", "/km2"}, {"_dBm", "dBm"}, {"_dBi", "dBi"}, {"_dB", "dB"},
      {"_km_per_s", "km/s"}, {"_km", "km"}, {"_GHz", "GHz"}, {"_us", "us"}, {"_deg", "deg"},
  };
  for (const auto& [suffix, unit] : kSuffixes) {
    if (key.size() >= suffix.size() && key.substr(key.size() - suffix.size()) == suffix) {
      return unit;
    }
  }
  return {};
}

inline double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("invalid value for '" + key + "': empty");
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) throw ConfigError("invalid value for '" + key + "': '" + t + "' is not a number");
  const std::string unit = trim(std::string_view(end));
  if (!unit.empty()) {
    const auto expected = unit_of(key);
    if (expected.empty()) {
      throw ConfigError("unit violation for '" + key + "': dimensionless key given unit '" + unit +
                        "'");
    }
    const bool density_alias = expected == "/km2" && (unit == "/km^2" || unit == "per_km2");
    if (unit != expected && !density_alias) {
      throw ConfigError("unit violation for '" + key + "': expected " + std::string(expected) +
                        ", got '" + unit + "'");
    }
  }
  if (std::isnan(v)) throw ConfigError("invalid value for '" + key + "': NaN");
  return v;
}

inline std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number(key, item));
  return out;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text, Int min_value) {
  const std::string t = trim(text);
  Int v{};
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ConfigError("invalid value for '" + key + "': '" + t + "' is not an integer");
  }
  if (v < min_value) {
    throw ConfigError("invalid value for '" + key + "': must be >= " + std::to_string(min_value));
  }
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "on") return true;
  if (t == "false" || t == "0" || t == "off") return false;
  throw ConfigError("invalid value for '" + key + "': expected true or false");
}

inline std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

template <typename T, typename F>
std::string join_mapped(const std::vector<T>& items, F&& f) {
  std::vector<std::string> s;
  s.reserve(items.size());
  for (const auto& x : items) s.push_back(f(x));
  return join(s);
}

enum class Check { kAny, kPositive, kNonNegative, kProbability, kFinite, kAtLeastHalf, kAtLeastTwo };

inline double checked(const std::string& key, double v, Check check) {
  auto fail = [&](const char* what) {
    throw ConfigError("invalid value for '" + key + "': " + format_shortest(v) + " " + what);
  };
  switch (check) {
    case Check::kAny: break;
    case Check::kPositive: if (!(v > 0.0) || std::isinf(v)) fail("must be > 0 and finite"); break;
    case Check::kNonNegative: if (!(v >= 0.0) || std::isinf(v)) fail("must be >= 0 and finite"); break;
    case Check::kProbability: if (!(v >= 0.0 && v <= 1.0)) fail("must lie in [0, 1]"); break;
    case Check::kFinite: if (!std::isfinite(v)) fail("must be finite"); break;
    case Check::kAtLeastHalf: if (!(v >= 0.5) || std::isinf(v)) fail("must be >= 0.5"); break;
    case Check::kAtLeastTwo: if (!(v >= 2.0) || std::isinf(v)) fail("must be >= 2"); break;
  }
  return v;
}

/// Values gathered while applying keys; shells are rebuilt from them at the end.
struct ShellDraft {
  std::vector<double> altitudes;
  std::vector<double> densities;
  double earth_radius_km = kDefaultEarthRadiusKm;
  double min_elevation_deg = 10.0;

  explicit ShellDraft(const ExperimentConfig& c) {
    for (const auto& s : c.shells) {
      altitudes.push_back(s.altitude_km);
      densities.push_back(s.density_per_km2);
    }
    if (!c.shells.empty()) {
      earth_radius_km = c.shells.front().earth_radius_km;
      min_elevation_deg = c.shells.front().min_elevation_deg;
    }
  }

  std::vector<ShellConfig> build() const {
    auto alt = altitudes;
    auto den = densities;
    if (alt.size() != den.size()) {
      if (alt.size() == 1) alt.resize(den.size(), alt.front());
      else if (den.size() == 1) den.resize(alt.size(), den.front());
      else {
        throw ConfigError(
            "invalid value for 'ntn.altitude_km': ntn.altitude_km and ntn.density_per_km2 must "
            "list the same number of shells");
      }
    }
    std::vector<ShellConfig> shells;
    for (std::size_t i = 0; i < alt.size(); ++i) {
      shells.push_back({alt[i], den[i], earth_radius_km, min_elevation_deg});
    }
    return shells;
  }
};

struct KeySpec {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, ShellDraft&, const std::string& key, const std::string&)> set;
};

inline void add_link_keys(std::vector<KeySpec>& keys, const std::string& prefix,
                          LinkParams ExperimentConfig::*member) {
  auto number = [&](const std::string& name, double LinkParams::*field, Check check) {
    keys.push_back({prefix + name,
                    [member, field](const ExperimentConfig& c) { return format_shortest((c.*member).*field); },
                    [member, field, check](ExperimentConfig& c, ShellDraft&, const std::string& k,
                                           const std::string& v) {
                      (c.*member).*field = checked(k, parse_number(k, v), check);
                    }});
  };
  number("tx_power_dBm", &LinkParams::tx_power_dBm, Check::kFinite);
  number("mainlobe_gain_dBi", &LinkParams::mainlobe_gain_dBi, Check::kFinite);
  number("sidelobe_gain_dBi", &LinkParams::sidelobe_gain_dBi, Check::kFinite);
  number("rx_gain_dBi", &LinkParams::rx_gain_dBi, Check::kFinite);
  number("pathloss_exponent", &LinkParams::pathloss_exponent, Check::kAtLeastTwo);
  number("carrier_frequency_GHz", &LinkParams::carrier_frequency_GHz, Check::kPositive);
  number("nakagami_m", &LinkParams::nakagami_m, Check::kAtLeastHalf);
  keys.push_back({prefix + "antennas",
                  [member](const ExperimentConfig& c) { return std::to_string((c.*member).antennas); },
                  [member](ExperimentConfig& c, ShellDraft&, const std::string& k, const std::string& v) {
                    (c.*member).antennas = parse_integer<int>(k, v, 1);
                  }});
}

inline Scenario parse_scenario(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "fig3_beamforming" || t == "fig3") return Scenario::kFig3Beamforming;
  if (t == "fig4_pilots" || t == "fig4") return Scenario::kFig4Pilots;
  if (t == "fig6_mc_vs_sc" || t == "fig6") return Scenario::kFig6McVsSc;
  if (t == "custom") return Scenario::kCustom;
  throw ConfigError("invalid value for '" + key + "': unknown scenario '" + t + "'");
}

inline const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> k;
    using C = ExperimentConfig;
    using D = ShellDraft;
    using S = const std::string&;

    k.push_back({"scenario", [](const C& c) { return std::string(to_string(c.scenario)); },
                 [](C& c, D&, S key, S v) { c.scenario = parse_scenario(key, v); }});
    k.push_back({"run.seed", [](const C& c) { return std::to_string(c.master_seed); },
                 [](C& c, D&, S key, S v) { c.master_seed = parse_integer<std::uint64_t>(key, v, 0); }});
    k.push_back({"run.trials", [](const C& c) { return std::to_string(c.n_trials); },
                 [](C& c, D&, S key, S v) { c.n_trials = parse_integer<std::size_t>(key, v, 1); }});

    k.push_back({"geometry.earth_radius_km",
                 [](const C& c) { return format_shortest(c.earth_radius_km()); },
                 [](C&, D& d, S key, S v) {
                   d.earth_radius_km = checked(key, parse_number(key, v), Check::kPositive);
                 }});
    k.push_back({"geometry.side_km", [](const C& c) { return format_shortest(c.region.side_km); },
                 [](C& c, D&, S key, S v) {
                   c.region.side_km = checked(key, parse_number(key, v), Check::kPositive);
                 }});
    k.push_back({"geometry.ue_density_per_km2",
                 [](const C& c) { return format_shortest(c.region.ue_density_per_km2); },
                 [](C& c, D&, S key, S v) {
                   c.region.ue_density_per_km2 = checked(key, parse_number(key, v), Check::kNonNegative);
                 }});
    k.push_back({"geometry.ues_per_cell",
                 [](const C& c) { return std::to_string(c.region.ues_per_cell); },
                 [](C& c, D&, S key, S v) {
                   c.region.ues_per_cell = parse_integer<std::size_t>(key, v, 1);
                 }});

    k.push_back({"ntn.layout", [](const C& c) { return std::string(to_string(c.layout)); },
                 [](C& c, D&, S key, S v) {
                   const auto t = trim(v);
                   if (t == "poisson") c.layout = SatelliteLayout::kPoisson;
                   else if (t == "zenith") c.layout = SatelliteLayout::kZenith;
                   else throw ConfigError("invalid value for '" + key + "': expected poisson or zenith");
                 }});
    k.push_back({"ntn.altitude_km",
                 [](const C& c) {
                   return join_mapped(c.shells, [](const ShellConfig& s) { return format_shortest(s.altitude_km); });
                 },
                 [](C&, D& d, S key, S v) {
                   d.altitudes = parse_number_list(key, v);
                   for (double x : d.altitudes) checked(key, x, Check::kPositive);
                 }});
    k.push_back({"ntn.density_per_km2",
                 [](const C& c) {
                   return join_mapped(c.shells, [](const ShellConfig& s) { return format_shortest(s.density_per_km2); });
                 },
                 [](C&, D& d, S key, S v) {
                   d.densities = parse_number_list(key, v);
                   for (double x : d.densities) checked(key, x, Check::kNonNegative);
                 }});
    k.push_back({"ntn.min_elevation_deg",
                 [](const C& c) {
                   return format_shortest(c.shells.empty() ? 10.0 : c.shells.front().min_elevation_deg);
                 },
                 [](C&, D& d, S key, S v) {
                   const double x = parse_number(key, v);
                   if (!(x >= 0.0 && x < 90.0)) {
                     throw ConfigError("invalid value for '" + key + "': must lie in [0, 90)");
                   }
                   d.min_elevation_deg = x;
                 }});
    add_link_keys(k, "ntn.", &C::ntn);
    k.push_back({"ntn.blockage_prob",
                 [](const C& c) { return format_shortest(c.availability.sat_blockage_prob); },
                 [](C& c, D&, S key, S v) {
                   c.availability.sat_blockage_prob = checked(key, parse_number(key, v), Check::kProbability);
                 }});

    k.push_back({"tn.density_per_km2",
                 [](const C& c) { return format_shortest(c.region.bs_density_per_km2); },
                 [](C& c, D&, S key, S v) {
                   c.region.bs_density_per_km2 = checked(key, parse_number(key, v), Check::kNonNegative);
                 }});
    k.push_back({"tn.service_radius_km",
                 [](const C& c) { return format_shortest(c.region.bs_service_radius_km); },
                 [](C& c, D&, S key, S v) {
                   c.region.bs_service_radius_km = checked(key, parse_number(key, v), Check::kPositive);
                 }});
    add_link_keys(k, "tn.", &C::tn);
    k.push_back({"tn.blockage_prob",
                 [](const C& c) { return format_shortest(c.availability.bs_blockage_prob); },
                 [](C& c, D&, S key, S v) {
                   c.availability.bs_blockage_prob = checked(key, parse_number(key, v), Check::kProbability);
                 }});
    k.push_back({"tn.min_power_dBm",
                 [](const C& c) { return format_shortest(c.availability.bs_min_power_dBm); },
                 [](C& c, D&, S key, S v) { c.availability.bs_min_power_dBm = parse_number(key, v); }});

    k.push_back({"noise.power_dBm", [](const C& c) { return format_shortest(c.noise.noise_power_dBm); },
                 [](C& c, D&, S key, S v) {
                   c.noise.noise_power_dBm = checked(key, parse_number(key, v), Check::kFinite);
                 }});

    k.push_back({"pilots.grid",
                 [](const C& c) { return join_mapped(c.pilot_grid, [](int p) { return std::to_string(p); }); },
                 [](C& c, D&, S key, S v) {
                   c.pilot_grid.clear();
                   for (const auto& item : split_list(v)) c.pilot_grid.push_back(parse_integer<int>(key, item, 1));
                 }});
    k.push_back({"pilots.snr_dB", [](const C& c) { return format_shortest(c.pilots.pilot_snr_dB); },
                 [](C& c, D&, S key, S v) { c.pilots.pilot_snr_dB = parse_number(key, v); }});
    k.push_back({"pilots.num_ues", [](const C& c) { return std::to_string(c.pilots.num_ues); },
                 [](C& c, D&, S key, S v) { c.pilots.num_ues = parse_integer<int>(key, v, 1); }});
    k.push_back({"pilots.ues_from_density",
                 [](const C& c) { return std::string(c.pilot_ues_from_density ? "true" : "false"); },
                 [](C& c, D&, S key, S v) { c.pilot_ues_from_density = parse_bool(key, v); }});
    k.push_back({"pilots.seeds", [](const C& c) { return std::to_string(c.pilot_seeds); },
                 [](C& c, D&, S key, S v) { c.pilot_seeds = parse_integer<int>(key, v, 1); }});

    k.push_back({"sync.cp_length_us", [](const C& c) { return format_shortest(c.sync.cp_length_us); },
                 [](C& c, D&, S key, S v) {
                   c.sync.cp_length_us = checked(key, parse_number(key, v), Check::kPositive);
                 }});
    k.push_back({"sync.slot_duration_us",
                 [](const C& c) { return format_shortest(c.sync.slot_duration_us); },
                 [](C& c, D&, S key, S v) {
                   c.sync.slot_duration_us = checked(key, parse_number(key, v), Check::kPositive);
                 }});
    k.push_back({"sync.speed_of_light_km_per_s",
                 [](const C& c) { return format_shortest(c.sync.speed_of_light_km_per_s); },
                 [](C& c, D&, S key, S v) {
                   c.sync.speed_of_light_km_per_s = checked(key, parse_number(key, v), Check::kPositive);
                 }});

    k.push_back({"schedule.combining", [](const C& c) { return std::string(to_string(c.combining)); },
                 [](C& c, D&, S key, S v) {
                   const auto t = trim(v);
                   if (t == "joint") c.combining = Combining::kJoint;
                   else if (t == "selection") c.combining = Combining::kSelection;
                   else throw ConfigError("invalid value for '" + key + "': expected joint or selection");
                 }});
    k.push_back({"schedule.sats", [](const C& c) { return std::to_string(c.cluster_sats); },
                 [](C& c, D&, S key, S v) { c.cluster_sats = parse_integer<std::size_t>(key, v, 0); }});
    k.push_back({"schedule.bss", [](const C& c) { return std::to_string(c.cluster_bss); },
                 [](C& c, D&, S key, S v) { c.cluster_bss = parse_integer<std::size_t>(key, v, 0); }});
    k.push_back({"schedule.interference",
                 [](const C& c) { return std::string(c.interference ? "true" : "false"); },
                 [](C& c, D&, S key, S v) { c.interference = parse_bool(key, v); }});

    k.push_back({"sweep.sinr_thresholds_dB",
                 [](const C& c) { return join_mapped(c.sinr_thresholds_dB, [](double x) { return format_shortest(x); }); },
                 [](C& c, D&, S key, S v) {
                   if (trim(v).empty()) throw ConfigError("invalid value for '" + key + "': empty threshold grid");
                   c.sinr_thresholds_dB = parse_number_list(key, v);
                 }});
    k.push_back({"sweep.nakagami_m",
                 [](const C& c) { return join_mapped(c.nakagami_grid, [](double x) { return format_shortest(x); }); },
                 [](C& c, D&, S key, S v) {
                   c.nakagami_grid = parse_number_list(key, v);
                   for (double m : c.nakagami_grid) checked(key, m, Check::kAtLeastHalf);
                 }});
    return k;
  }();
  return table;
}

inline const KeySpec* find_key(std::string_view key) {
  for (const auto& spec : key_table()) {
    if (spec.key == key) return &spec;
  }
  return nullptr;
}

}  // namespace config_detail

/// Every key accepted by the parser, in file order.
inline std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& spec : config_detail::key_table()) out.push_back(spec.key);
  return out;
}

inline std::vector<KeyValue> config_to_key_values(const ExperimentConfig& config) {
  std::vector<KeyValue> out;
  for (const auto& spec : config_detail::key_table()) out.emplace_back(spec.key, spec.get(config));
  return out;
}

inline std::string write_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [k, v] : config_to_key_values(config)) out += k + " = " + v + "\n";
  return out;
}

/// Applies `overrides` in order on top of `base`, then validates the result.
inline ExperimentConfig apply_overrides(ExperimentConfig base, const std::vector<KeyValue>& overrides) {
  config_detail::ShellDraft draft(base);
  for (const auto& [key, value] : overrides) {
    const auto* spec = config_detail::find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'");
    spec->set(base, draft, key, value);
  }
  base.shells = draft.build();
  if (base.shells.empty()) throw ConfigError("invalid value for 'ntn.altitude_km': no shells");
  if (base.scenario == Scenario::kFig4Pilots && base.pilot_grid.empty()) {
    throw ConfigError("invalid value for 'pilots.grid': empty pilot grid");
  }
  for (std::size_t i = 1; i < base.sinr_thresholds_dB.size(); ++i) {
    if (!(base.sinr_thresholds_dB[i] > base.sinr_thresholds_dB[i - 1])) {
      throw ConfigError("invalid value for 'sweep.sinr_thresholds_dB': grid must be strictly increasing");
    }
  }
  if (base.cluster_sats + base.cluster_bss < 1) {
    throw ConfigError("invalid value for 'schedule.sats': schedule.sats + schedule.bss must be >= 1");
  }
  if (!(base.sync.slot_duration_us > base.sync.cp_length_us)) {
    throw ConfigError("invalid value for 'sync.slot_duration_us': must exceed sync.cp_length_us");
  }
  if (std::isnan(base.pilots.pilot_snr_dB)) {
    throw ConfigError("invalid value for 'pilots.snr_dB': NaN");
  }
  try {
    base.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return base;
}

/// Parses `key = value` lines ('#' starts a comment). The `scenario` key, if
/// present, selects the base preset that the remaining keys override.
inline std::vector<KeyValue> parse_key_values(std::string_view text, const std::string& origin = "config") {
  std::vector<KeyValue> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = config_detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    out.emplace_back(config_detail::trim(std::string_view(t).substr(0, eq)),
                     config_detail::trim(std::string_view(t).substr(eq + 1)));
  }
  return out;
}

inline ExperimentConfig config_from_key_values(const std::vector<KeyValue>& kv) {
  std::string base_name = "custom";
  for (const auto& [k, v] : kv) {
    if (k == "scenario") {
      base_name = std::string(to_string(config_detail::parse_scenario(k, v)));
    }
  }
  return apply_overrides(preset(base_name), kv);
}

inline ExperimentConfig parse_config_text(std::string_view text) {
  return config_from_key_values(parse_key_values(text));
}

inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_key_values(parse_key_values(buf.str(), path.string()));
}

/// Splits a `--set key=value` argument.
inline KeyValue parse_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' must have the form key=value");
  }
  return {config_detail::trim(assignment.substr(0, eq)), config_detail::trim(assignment.substr(eq + 1))};
}

}  // namespace stinsim
