#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stinsim/channel.hpp"
#include "stinsim/connectivity.hpp"
#include "stinsim/error.hpp"
#include "stinsim/estimation.hpp"
#include "stinsim/geometry.hpp"
#include "stinsim/sync.hpp"

namespace stinsim {

enum class Scenario { kFig3Beamforming, kFig4Pilots, kFig6McVsSc, kCustom };

/// kZenith replaces the point process with one satellite per shell directly
/// overhead the typical UE: a deterministic single link for analytic checks.
enum class SatelliteLayout { kPoisson, kZenith };

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::kFig3Beamforming: return "fig3_beamforming";
    case Scenario::kFig4Pilots: return "fig4_pilots";
    case Scenario::kFig6McVsSc: return "fig6_mc_vs_sc";
    case Scenario::kCustom: return "custom";
  }
  return "custom";
}

inline std::string_view to_string(SatelliteLayout l) {
  return l == SatelliteLayout::kZenith ? "zenith" : "poisson";
}

inline std::string_view to_string(Combining c) {
  return c == Combining::kSelection ? "selection" : "joint";
}

struct ExperimentConfig {
  Scenario scenario = Scenario::kCustom;

  // geometry
  std::vector<ShellConfig> shells;
  SatelliteLayout layout = SatelliteLayout::kPoisson;
  RegionConfig region;

  // radio
  LinkParams ntn;
  LinkParams tn;
  NoiseConfig noise;

  // estimation experiment
  PilotConfig pilots;
  std::vector<int> pilot_grid;
  bool pilot_ues_from_density = false;
  int pilot_seeds = 20;

  SyncConfig sync;
  AvailabilityModel availability;

  // scheduling
  Combining combining = Combining::kJoint;
  std::size_t cluster_sats = 1;  ///< K serving satellites in MC
  std::size_t cluster_bss = 1;   ///< L serving BSs in MC
  bool interference = true;

  std::vector<double> sinr_thresholds_dB;
  std::vector<double> nakagami_grid;  ///< NTN m values swept by the beamforming experiment

  std::size_t n_trials = 10000;
  std::uint64_t master_seed = 1;

  double earth_radius_km() const {
    return shells.empty() ? kDefaultEarthRadiusKm : shells.front().earth_radius_km;
  }

  void validate() const {
    if (n_trials < 1) throw DomainError("n_trials must be >= 1");
    for (const auto& s : shells) s.validate();
    region.validate();
    ntn.validate();
    tn.validate();
    if (!std::isfinite(noise.noise_power_dBm)) throw DomainError("noise power must be finite");
    pilots.validate();
    if (pilot_seeds < 1) throw DomainError("pilot_seeds must be >= 1");
    for (int p : pilot_grid) {
      if (p < 1) throw DomainError("pilot grid entries must be >= 1");
    }
    sync.validate();
    availability.validate();
    if (cluster_sats + cluster_bss < 1) throw DomainError("MC needs at least one serving slot");
    if (sinr_thresholds_dB.empty()) throw DomainError("SINR threshold grid must not be empty");
    for (std::size_t i = 1; i < sinr_thresholds_dB.size(); ++i) {
      if (!(sinr_thresholds_dB[i] > sinr_thresholds_dB[i - 1])) {
        throw DomainError("SINR threshold grid must be strictly increasing");
      }
    }
    for (double m : nakagami_grid) {
      if (!(m >= 0.5)) throw DomainError("nakagami grid entries must be >= 0.5");
    }
    if (scenario == Scenario::kFig4Pilots && pilot_grid.empty()) {
      throw DomainError("pilot grid must not be empty");
    }
  }
};

inline std::vector<double> threshold_range(double first_dB, double last_dB, double step_dB) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((last_dB - first_dB) / step_dB + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(first_dB + step_dB * static_cast<double>(i));
  return out;
}

namespace detail {

// NTN parameters shared by the beamforming and estimation experiments.
inline ExperimentConfig beamforming_base() {
  ExperimentConfig c;
  c.shells = {ShellConfig{.altitude_km = 500.0, .density_per_km2 = 1e-5}};
  c.region = RegionConfig{.side_km = 50.0,
                          .bs_density_per_km2 = 0.0,
                          .bs_service_radius_km = 8.0,
                          .ue_density_per_km2 = 4e-6,
                          .ues_per_cell = 1};
  c.ntn = LinkParams{.tx_power_dBm = 50.0,
                     .mainlobe_gain_dBi = 30.0,
                     .sidelobe_gain_dBi = 10.0,
                     .rx_gain_dBi = 10.0,
                     .pathloss_exponent = 2.0,
                     .carrier_frequency_GHz = 2.0,
                     .nakagami_m = 1.0,
                     .antennas = 4};
  c.tn = LinkParams{.tx_power_dBm = 46.0,
                    .mainlobe_gain_dBi = 0.0,
                    .sidelobe_gain_dBi = 0.0,
                    .rx_gain_dBi = 0.0,
                    .pathloss_exponent = 3.5,
                    .carrier_frequency_GHz = 2.0,
                    .nakagami_m = 1.0,
                    .antennas = 4};
  c.noise.noise_power_dBm = -110.0;
  c.pilots = PilotConfig{.num_pilots = 1, .pilot_snr_dB = 10.0, .num_ues = 100, .antennas = 4};
  c.pilot_grid = {1, 2, 4, 8, 16};
  c.cluster_sats = 3;
  c.cluster_bss = 0;
  c.sinr_thresholds_dB = threshold_range(-10.0, 20.0, 1.0);
  c.nakagami_grid = {1.0, 2.0, 5.0};
  c.n_trials = 10000;
  c.master_seed = 20250101;
  return c;
}

}  // namespace detail

/// Parameter sets of the three reference experiments. Accepts the full names
/// and the short aliases fig3 / fig4 / fig6; "custom" starts from fig6.
inline ExperimentConfig preset(std::string_view name) {
  if (name == "fig3_beamforming" || name == "fig3") {
    auto c = detail::beamforming_base();
    c.scenario = Scenario::kFig3Beamforming;
    return c;
  }
  if (name == "fig4_pilots" || name == "fig4") {
    auto c = detail::beamforming_base();
    c.scenario = Scenario::kFig4Pilots;
    c.ntn.nakagami_m = 2.0;
    c.nakagami_grid = {2.0};
    c.pilot_ues_from_density = true;
    c.pilot_seeds = 20;
    c.n_trials = 2000;
    return c;
  }
  if (name == "fig6_mc_vs_sc" || name == "fig6" || name == "custom") {
    auto c = detail::beamforming_base();
    c.scenario = name == "custom" ? Scenario::kCustom : Scenario::kFig6McVsSc;
    c.shells = {ShellConfig{.altitude_km = 500.0, .density_per_km2 = 5e-7}};
    c.region.bs_density_per_km2 = 6e-3;
    c.region.bs_service_radius_km = 8.0;
    c.region.ues_per_cell = 4;
    c.ntn.tx_power_dBm = 50.0;
    c.ntn.nakagami_m = 2.0;
    c.tn.tx_power_dBm = 46.0;
    c.tn.pathloss_exponent = 3.5;
    c.cluster_sats = 1;
    c.cluster_bss = 1;
    c.nakagami_grid = {2.0};
    return c;
  }
  throw DomainError("unknown preset '" + std::string(name) +
                    "' (expected fig3_beamforming, fig4_pilots, fig6_mc_vs_sc or custom)");
}

}  // namespace stinsim
