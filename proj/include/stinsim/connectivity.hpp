#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "stinsim/error.hpp"
#include "stinsim/random.hpp"
#include "stinsim/units.hpp"

namespace stinsim {

/// SS-SBS scheduling state of a UE.
enum class Mode {
  kMode1 = 1,  ///< satellite + BS
  kMode2 = 2,  ///< satellite only
  kMode3 = 3,  ///< BS only
  kMode4 = 4,  ///< unserved
};

enum class Combining { kJoint, kSelection };

struct AvailabilityModel {
  double sat_blockage_prob = 0.0;
  double bs_blockage_prob = 0.0;
  double bs_min_power_dBm = -std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(sat_blockage_prob >= 0.0 && sat_blockage_prob <= 1.0)) {
      throw DomainError("sat_blockage_prob must lie in [0, 1]");
    }
    if (!(bs_blockage_prob >= 0.0 && bs_blockage_prob <= 1.0)) {
      throw DomainError("bs_blockage_prob must lie in [0, 1]");
    }
    if (std::isnan(bs_min_power_dBm)) throw DomainError("bs_min_power_dBm must not be NaN");
  }
};

struct ConnectivityDecision {
  Mode mode = Mode::kMode4;
  std::vector<std::size_t> serving_sats;
  std::vector<std::size_t> serving_bss;
  std::vector<std::size_t> interferer_sats;
  std::vector<std::size_t> interferer_bss;
};

/// Candidates ordered by (distance, index): the canonical nearest-first order.
inline std::vector<std::size_t> nearest_first(std::span<const std::size_t> candidates,
                                              std::span<const double> distances) {
  if (candidates.size() != distances.size()) {
    throw DomainError("candidate and distance lists differ in length");
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (distances[a] != distances[b]) return distances[a] < distances[b];
    return candidates[a] < candidates[b];
  });
  std::vector<std::size_t> out;
  out.reserve(order.size());
  for (auto k : order) out.push_back(candidates[k]);
  return out;
}

/// Nearest visible satellite; nullopt signals that no satellite is available.
/// `distances[i]` is the slant range of satellite `visible[i]`.
inline std::optional<std::size_t> select_serving_satellite(std::span<const std::size_t> visible,
                                                           std::span<const double> distances) {
  if (visible.size() != distances.size()) {
    throw DomainError("select_serving_satellite: length mismatch");
  }
  if (visible.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < visible.size(); ++i) {
    if (distances[i] < distances[best] ||
        (distances[i] == distances[best] && visible[i] < visible[best])) {
      best = i;
    }
  }
  return visible[best];
}

/// The min(k, |visible|) nearest satellites, nearest first.
inline std::vector<std::size_t> select_cluster(std::span<const std::size_t> visible,
                                               std::span<const double> distances, std::size_t k) {
  if (k < 1) throw DomainError("select_cluster: k must be >= 1");
  auto order = nearest_first(visible, distances);
  if (order.size() > k) order.resize(k);
  return order;
}

constexpr Mode determine_mode(bool sat_ok, bool bs_ok) {
  if (sat_ok) return bs_ok ? Mode::kMode1 : Mode::kMode2;
  return bs_ok ? Mode::kMode3 : Mode::kMode4;
}

/// One blockage coin is always consumed so the availability stream advances
/// identically whatever the outcome.
inline bool link_available(double mean_power_mw, double blockage_prob, double min_power_dBm,
                           RandomEngine& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < blockage_prob) return false;
  return mw_to_dbm(mean_power_mw) >= min_power_dBm;
}

inline double compute_sinr(std::span<const double> serving_mw, std::span<const double> interfering_mw,
                           double noise_mw, Combining combining) {
  if (!(noise_mw > 0.0)) throw DomainError("compute_sinr: noise power must be positive");
  if (serving_mw.empty()) return 0.0;
  double denominator = noise_mw;
  for (double p : interfering_mw) denominator += p;
  if (combining == Combining::kJoint) {
    double signal = 0.0;
    for (double p : serving_mw) signal += p;
    return signal / denominator;
  }
  return *std::max_element(serving_mw.begin(), serving_mw.end()) / denominator;
}

inline bool coverage_indicator(double sinr_linear, double threshold_dB) {
  return sinr_linear >= db_to_linear(threshold_dB);
}

/// Generalized (K satellites, L BSs) association. `sat_candidates` and
/// `bs_candidates` are the eligible servers nearest-first; `visible_sats` and
/// `region_bss` are everything that transmits. Non-serving transmitters are
/// interferers when `interference` is set.
inline ConnectivityDecision associate(std::span<const std::size_t> visible_sats,
                                      std::span<const std::size_t> sat_candidates,
                                      std::size_t region_bss,
                                      std::span<const std::size_t> bs_candidates, bool sat_ok,
                                      bool bs_ok, std::size_t k_sats, std::size_t l_bss,
                                      bool interference) {
  ConnectivityDecision d;
  if (sat_ok && k_sats > 0) {
    const auto n = std::min(k_sats, sat_candidates.size());
    d.serving_sats.assign(sat_candidates.begin(), sat_candidates.begin() + static_cast<long>(n));
  }
  if (bs_ok && l_bss > 0) {
    const auto n = std::min(l_bss, bs_candidates.size());
    d.serving_bss.assign(bs_candidates.begin(), bs_candidates.begin() + static_cast<long>(n));
  }
  d.mode = determine_mode(!d.serving_sats.empty(), !d.serving_bss.empty());
  if (interference) {
    for (auto s : visible_sats) {
      if (std::find(d.serving_sats.begin(), d.serving_sats.end(), s) == d.serving_sats.end()) {
        d.interferer_sats.push_back(s);
      }
    }
    for (std::size_t b = 0; b < region_bss; ++b) {
      if (std::find(d.serving_bss.begin(), d.serving_bss.end(), b) == d.serving_bss.end()) {
        d.interferer_bss.push_back(b);
      }
    }
  }
  return d;
}

}  // namespace stinsim
