#pragma once

// Monte Carlo driver. Every trial samples one world and one set of fading
// draws, then evaluates all connectivity schemes (and beamforming on/off) on
// that same realization, so scheme comparisons are paired trial by trial.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "stinsim/channel.hpp"
#include "stinsim/connectivity.hpp"
#include "stinsim/estimation.hpp"
#include "stinsim/experiment_config.hpp"
#include "stinsim/geometry.hpp"
#include "stinsim/random.hpp"
#include "stinsim/sync.hpp"

namespace stinsim {

enum class Scheme : std::size_t { kMultiConnectivity = 0, kSatelliteOnly = 1, kBaseStationOnly = 2 };

inline constexpr std::array<Scheme, 3> kAllSchemes = {
    Scheme::kMultiConnectivity, Scheme::kSatelliteOnly, Scheme::kBaseStationOnly};

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kMultiConnectivity: return "mc";
    case Scheme::kSatelliteOnly: return "sc_sat";
    case Scheme::kBaseStationOnly: return "sc_bs";
  }
  return "mc";
}

struct TrialResult {
  std::array<double, 3> sinr{};  ///< per scheme, beamforming on
  std::array<double, 3> sinr_no_beamforming{};
  Mode mode = Mode::kMode4;
  std::size_t serving_sats = 0;
  std::size_t serving_bss = 0;
  std::optional<double> sync_residual_us;  ///< empty when nothing serves the UE
  bool sync_aligned = true;

  double sinr_of(Scheme s, bool beamforming = true) const {
    const auto i = static_cast<std::size_t>(s);
    return beamforming ? sinr[i] : sinr_no_beamforming[i];
  }

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct CoverageEstimate {
  double threshold_dB = 0.0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};

struct DiscrepancyPoint {
  int num_pilots = 1;
  double ks_mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int seeds = 0;
};

struct World {
  Constellation constellation;
  TerrestrialSet terrestrial;
};

/// Linear-scale view of a config, computed once per run.
struct ResolvedLinks {
  LinkBudget ntn;
  LinkBudget tn;
  double noise_mw = 1.0;

  explicit ResolvedLinks(const ExperimentConfig& c)
      : ntn(c.ntn), tn(c.tn), noise_mw(c.noise.noise_mw()) {}
};

/// 95% Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n,
                                                 double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
  return {std::clamp(std::min(centre - half, p), 0.0, 1.0),
          std::clamp(std::max(centre + half, p), 0.0, 1.0)};
}

inline World sample_world(const ExperimentConfig& config, std::uint64_t trial_index) {
  auto rng = make_stream(config.master_seed, trial_index, StreamPurpose::kGeometry);
  World w;
  for (const auto& shell : config.shells) {
    Shell s{shell, {}};
    if (config.layout == SatelliteLayout::kZenith) {
      s.positions.push_back({0.0, 0.0, shell.radius_km()});
    } else {
      s.positions = sample_shell(shell, rng);
    }
    w.constellation.shells.push_back(std::move(s));
  }
  w.terrestrial = sample_region(config.region, rng);
  return w;
}

namespace detail {

inline double scheme_sinr(const ConnectivityDecision& d, bool beamforming,
                          const std::vector<double>& sat_distance_by_index,
                          const std::vector<double>& sat_fading_by_index,
                          const std::vector<double>& bs_distance,
                          const std::vector<double>& bs_fading, const ResolvedLinks& links,
                          Combining combining) {
  std::vector<double> serving;
  std::vector<double> interfering;
  serving.reserve(d.serving_sats.size() + d.serving_bss.size());
  interfering.reserve(d.interferer_sats.size() + d.interferer_bss.size());
  const double ref = links.tn.reference().distance_km;
  for (auto s : d.serving_sats) {
    serving.push_back(
        links.ntn.mean_power_mw(sat_distance_by_index[s], LinkRole::kServing, beamforming) *
        sat_fading_by_index[s]);
  }
  for (auto b : d.serving_bss) {
    serving.push_back(links.tn.mean_power_mw(std::max(bs_distance[b], ref), LinkRole::kServing,
                                             beamforming) *
                      bs_fading[b]);
  }
  for (auto s : d.interferer_sats) {
    interfering.push_back(
        links.ntn.mean_power_mw(sat_distance_by_index[s], LinkRole::kInterfering, beamforming) *
        sat_fading_by_index[s]);
  }
  for (auto b : d.interferer_bss) {
    interfering.push_back(links.tn.mean_power_mw(std::max(bs_distance[b], ref),
                                                 LinkRole::kInterfering, beamforming) *
                          bs_fading[b]);
  }
  return compute_sinr(serving, interfering, links.noise_mw, combining);
}

}  // namespace detail

/// Evaluates every scheme on an already-sampled world. Fading and
/// availability draws come from the trial's own streams.
inline TrialResult evaluate_world(const ExperimentConfig& config, const ResolvedLinks& links,
                                  const World& world, std::uint64_t trial_index) {
  const Position3D ue = typical_ue_position(config.earth_radius_km());

  const auto sat_positions = world.constellation.flat_positions();
  std::vector<std::size_t> visible;
  {
    std::size_t offset = 0;
    for (const auto& shell : world.constellation.shells) {
      for (std::size_t i = 0; i < shell.positions.size(); ++i) {
        if (elevation_angle(ue, shell.positions[i]) >= shell.config.min_elevation_deg) {
          visible.push_back(offset + i);
        }
      }
      offset += shell.positions.size();
    }
  }
  std::vector<double> sat_distance(sat_positions.size(), 0.0);
  std::vector<double> visible_distance;
  visible_distance.reserve(visible.size());
  for (auto s : visible) {
    sat_distance[s] = slant_range(ue, sat_positions[s]);
    visible_distance.push_back(sat_distance[s]);
  }
  const auto sat_candidates = nearest_first(visible, visible_distance);

  const auto& terrestrial = world.terrestrial;
  const std::size_t n_bs = terrestrial.bs_positions.size();
  std::vector<double> bs_distance(n_bs);
  std::vector<std::size_t> in_range;
  std::vector<double> in_range_distance;
  for (std::size_t b = 0; b < n_bs; ++b) {
    bs_distance[b] = planar_distance(terrestrial.typical(), terrestrial.bs_positions[b]);
    if (bs_distance[b] <= config.region.bs_service_radius_km) {
      in_range.push_back(b);
      in_range_distance.push_back(bs_distance[b]);
    }
  }
  const auto bs_candidates = nearest_first(in_range, in_range_distance);

  auto fading_rng = make_stream(config.master_seed, trial_index, StreamPurpose::kFading);
  std::vector<double> sat_fading(sat_positions.size(), 0.0);
  for (auto s : visible) sat_fading[s] = sample_fading(config.ntn.nakagami_m, fading_rng).power_gain;
  std::vector<double> bs_fading(n_bs);
  for (auto& f : bs_fading) f = sample_fading(config.tn.nakagami_m, fading_rng).power_gain;

  auto avail_rng = make_stream(config.master_seed, trial_index, StreamPurpose::kAvailability);
  const double sat_power = sat_candidates.empty()
                               ? 0.0
                               : links.ntn.mean_power_mw(sat_distance[sat_candidates.front()],
                                                         LinkRole::kServing, true);
  const bool sat_coin = link_available(sat_power, config.availability.sat_blockage_prob,
                                       -std::numeric_limits<double>::infinity(), avail_rng);
  const double bs_power =
      bs_candidates.empty()
          ? 0.0
          : links.tn.mean_power_mw(
                std::max(bs_distance[bs_candidates.front()], links.tn.reference().distance_km),
                LinkRole::kServing, true);
  const bool bs_coin = link_available(bs_power, config.availability.bs_blockage_prob,
                                      config.availability.bs_min_power_dBm, avail_rng);
  const bool sat_ok = !sat_candidates.empty() && sat_coin;
  const bool bs_ok = !bs_candidates.empty() && bs_coin;

  const std::array<ConnectivityDecision, 3> decisions = {
      associate(visible, sat_candidates, n_bs, bs_candidates, sat_ok, bs_ok, config.cluster_sats,
                config.cluster_bss, config.interference),
      associate(visible, sat_candidates, n_bs, bs_candidates, sat_ok, false, 1, 0,
                config.interference),
      associate(visible, sat_candidates, n_bs, bs_candidates, false, bs_ok, 0, 1,
                config.interference),
  };

  TrialResult r;
  for (std::size_t k = 0; k < decisions.size(); ++k) {
    r.sinr[k] = detail::scheme_sinr(decisions[k], true, sat_distance, sat_fading, bs_distance,
                                    bs_fading, links, config.combining);
    r.sinr_no_beamforming[k] = detail::scheme_sinr(decisions[k], false, sat_distance, sat_fading,
                                                   bs_distance, bs_fading, links, config.combining);
  }
  const auto& mc = decisions[0];
  r.mode = mc.mode;
  r.serving_sats = mc.serving_sats.size();
  r.serving_bss = mc.serving_bss.size();

  if (!mc.serving_sats.empty() || !mc.serving_bss.empty()) {
    std::vector<double> sat_delays;
    std::vector<double> bs_delays;
    const double c = config.sync.speed_of_light_km_per_s;
    for (auto s : mc.serving_sats) sat_delays.push_back(propagation_delay_us(sat_distance[s], c));
    for (auto b : mc.serving_bss) bs_delays.push_back(propagation_delay_us(bs_distance[b], c));
    const auto report = msmbs_alignment(sat_delays, bs_delays, config.sync);
    r.sync_residual_us = report.max_residual_us;
    r.sync_aligned = report.aligned;
  }
  return r;
}

/// Deterministic in (master_seed, trial_index).
inline TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_index) {
  const ResolvedLinks links(config);
  return evaluate_world(config, links, sample_world(config, trial_index), trial_index);
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers over contiguous
/// blocks. Callers write results into slot i, so the gather order is fixed.
template <typename Fn>
void parallel_for_index(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const std::size_t block = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * block;
    const std::size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline std::vector<TrialResult> run_trials(const ExperimentConfig& config, unsigned threads = 1) {
  config.validate();
  const ResolvedLinks links(config);
  std::vector<TrialResult> results(config.n_trials);
  parallel_for_index(config.n_trials, threads, [&](std::size_t i) {
    results[i] = evaluate_world(config, links, sample_world(config, i), i);
  });
  return results;
}

inline std::vector<CoverageEstimate> coverage_from_trials(const std::vector<TrialResult>& trials,
                                                          Scheme scheme, bool beamforming,
                                                          const std::vector<double>& thresholds_dB) {
  std::vector<CoverageEstimate> curve;
  curve.reserve(thresholds_dB.size());
  for (double tau : thresholds_dB) {
    std::size_t covered = 0;
    for (const auto& t : trials) covered += coverage_indicator(t.sinr_of(scheme, beamforming), tau);
    const auto [lo, hi] = wilson_interval(covered, trials.size());
    curve.push_back({tau, static_cast<double>(covered) / static_cast<double>(trials.size()), lo, hi,
                     trials.size()});
  }
  return curve;
}

inline std::vector<CoverageEstimate> coverage_curve(const ExperimentConfig& config, Scheme scheme,
                                                    unsigned threads = 1, bool beamforming = true) {
  if (config.n_trials < 100) throw DomainError("coverage_curve: n_trials must be >= 100");
  return coverage_from_trials(run_trials(config, threads), scheme, beamforming,
                              config.sinr_thresholds_dB);
}

namespace detail {

inline int draw_pilot_population(const ExperimentConfig& config, std::uint64_t seed,
                                 std::uint64_t trial) {
  if (!config.pilot_ues_from_density || config.shells.empty()) return config.pilots.num_ues;
  auto rng = make_stream(seed, trial, StreamPurpose::kPopulation);
  const double mean = config.region.ue_density_per_km2 * footprint_area_km2(config.shells.front());
  const long long others = mean > 0.0 ? std::poisson_distribution<long long>(mean)(rng) : 0;
  return 1 + static_cast<int>(others);
}

}  // namespace detail

/// KS distance between ideal-CSI and estimated-CSI received-signal samples of
/// the typical UE (index 0), one value per pilot-grid entry for one seed.
inline std::vector<double> discrepancy_for_seed(const ExperimentConfig& config, int seed_index) {
  const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(seed_index));
  const int antennas = config.ntn.antennas;
  std::vector<double> ideal(config.n_trials);
  std::vector<std::vector<double>> estimated(config.pilot_grid.size(),
                                             std::vector<double>(config.n_trials));
  for (std::size_t t = 0; t < config.n_trials; ++t) {
    const int num_ues = detail::draw_pilot_population(config, seed, t);
    auto channel_rng = make_stream(seed, t, StreamPurpose::kChannels);
    std::vector<ChannelVector> channels;
    channels.reserve(static_cast<std::size_t>(num_ues));
    for (int u = 0; u < num_ues; ++u) {
      channels.push_back(sample_channel(antennas, config.ntn.nakagami_m, channel_rng));
    }
    ideal[t] = beamformed_signal_sample(channels[0], channels[0]);
    for (std::size_t g = 0; g < config.pilot_grid.size(); ++g) {
      auto pilot_rng = make_stream(seed, t, StreamPurpose::kPilots);
      auto noise_rng = make_stream(seed, t, StreamPurpose::kPilotNoise);
      const auto assignment = assign_pilots(num_ues, config.pilot_grid[g], pilot_rng);
      const auto est = estimate_channel(channels, assignment, config.pilots.pilot_snr_dB, noise_rng);
      estimated[g][t] = beamformed_signal_sample(channels[0], est[0]);
    }
  }
  std::vector<double> ks(config.pilot_grid.size());
  for (std::size_t g = 0; g < ks.size(); ++g) ks[g] = cdf_discrepancy(ideal, estimated[g]);
  return ks;
}

inline std::vector<DiscrepancyPoint> discrepancy_curve(const ExperimentConfig& config,
                                                       unsigned threads = 1) {
  config.validate();
  if (config.pilot_grid.empty()) throw DomainError("discrepancy_curve: pilot grid is empty");
  const auto seeds = static_cast<std::size_t>(config.pilot_seeds);
  std::vector<std::vector<double>> per_seed(seeds);
  parallel_for_index(seeds, threads, [&](std::size_t s) {
    per_seed[s] = discrepancy_for_seed(config, static_cast<int>(s));
  });

  std::vector<DiscrepancyPoint> curve;
  for (std::size_t g = 0; g < config.pilot_grid.size(); ++g) {
    double sum = 0.0;
    for (const auto& v : per_seed) sum += v[g];
    const double mean = sum / static_cast<double>(seeds);
    double half = 0.0;
    if (seeds > 1) {
      double ss = 0.0;
      for (const auto& v : per_seed) ss += (v[g] - mean) * (v[g] - mean);
      half = 1.959963984540054 * std::sqrt(ss / static_cast<double>(seeds - 1)) /
             std::sqrt(static_cast<double>(seeds));
    }
    curve.push_back({config.pilot_grid[g], mean, std::max(0.0, mean - half),
                     std::min(1.0, mean + half), static_cast<int>(seeds)});
  }
  return curve;
}

struct NamedCoverageCurve {
  std::string name;
  std::vector<CoverageEstimate> points;
};

struct ExperimentResult {
  std::vector<NamedCoverageCurve> coverage;
  std::vector<DiscrepancyPoint> discrepancy;
};

inline std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Curves produced per scenario:
///   beamforming: bf_m<m>, nobf_m<m> for each m of the grid (MC cluster scheme)
///   pilots:      discrepancy curve only
///   mc-vs-sc and custom: mc, sc_sat, sc_bs
inline ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 1) {
  config.validate();
  ExperimentResult out;
  switch (config.scenario) {
    case Scenario::kFig4Pilots:
      out.discrepancy = discrepancy_curve(config, threads);
      break;
    case Scenario::kFig3Beamforming:
      for (double m : config.nakagami_grid) {
        auto c = config;
        c.ntn.nakagami_m = m;
        const auto trials = run_trials(c, threads);
        const auto tag = format_shortest(m);
        out.coverage.push_back({"bf_m" + tag, coverage_from_trials(trials, Scheme::kMultiConnectivity,
                                                                   true, c.sinr_thresholds_dB)});
        out.coverage.push_back({"nobf_m" + tag,
                                coverage_from_trials(trials, Scheme::kMultiConnectivity, false,
                                                     c.sinr_thresholds_dB)});
      }
      break;
    case Scenario::kFig6McVsSc:
    case Scenario::kCustom: {
      const auto trials = run_trials(config, threads);
      for (auto s : kAllSchemes) {
        out.coverage.push_back({std::string(scheme_name(s)),
                                coverage_from_trials(trials, s, true, config.sinr_thresholds_dB)});
      }
      break;
    }
  }
  return out;
}

}  // namespace stinsim
