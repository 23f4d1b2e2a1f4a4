#pragma once

// Delay-domain synchronization: propagation delays, common timing advances
// within a cluster, slot-level + fine advance between a satellite and a BS,
// and the combined NTN/TN alignment check against the cyclic prefix.
// All times are in microseconds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "stinsim/error.hpp"
#include "stinsim/units.hpp"

namespace stinsim {

struct SyncConfig {
  double cp_length_us = 4.7;
  double slot_duration_us = 500.0;
  double speed_of_light_km_per_s = kSpeedOfLightKmPerS;

  void validate() const {
    if (!(cp_length_us > 0.0)) throw DomainError("cp_length_us must be > 0");
    if (!(slot_duration_us > cp_length_us)) {
      throw DomainError("slot_duration_us must exceed cp_length_us");
    }
    if (!(speed_of_light_km_per_s > 0.0)) throw DomainError("speed_of_light_km_per_s must be > 0");
  }
};

inline double propagation_delay_us(double distance_km,
                                   double speed_of_light_km_per_s = kSpeedOfLightKmPerS) {
  if (!(distance_km >= 0.0)) throw DomainError("propagation_delay: distance must be >= 0");
  return distance_km / speed_of_light_km_per_s * 1e6;
}

struct ClusterCompensation {
  double common_advance_us = 0.0;
  std::vector<double> residuals_us;

  double max_residual_us() const {
    return residuals_us.empty() ? 0.0 : *std::max_element(residuals_us.begin(), residuals_us.end());
  }
  bool aligned(double cp_length_us) const { return max_residual_us() <= cp_length_us; }
};

/// Common advance = earliest arrival; residuals are what the CP must absorb.
inline ClusterCompensation cluster_compensation(std::span<const double> delays_us) {
  if (delays_us.empty()) throw DomainError("cluster_compensation: empty delay list");
  ClusterCompensation out;
  out.common_advance_us = *std::min_element(delays_us.begin(), delays_us.end());
  out.residuals_us.reserve(delays_us.size());
  for (double d : delays_us) out.residuals_us.push_back(d - out.common_advance_us);
  return out;
}

struct SlotOffset {
  std::int64_t sat_slot_shift = 0;
  double sat_fine_advance_us = 0.0;
  /// Satellite arrival minus BS arrival once the advance is applied.
  double arrival_difference_us = 0.0;
};

/// The satellite transmits (shift * slot + fine) earlier than its cooperating
/// BS, with fine in [0, slot). shift * slot is an exact multiple and fine is
/// the rounded remainder of the same subtraction, so the residual is exactly 0
/// for either sign of the delay gap.
inline SlotOffset slot_offset_pair(double sat_delay_us, double bs_delay_us,
                                   double slot_duration_us) {
  if (!(sat_delay_us >= 0.0) || !(bs_delay_us >= 0.0)) {
    throw DomainError("slot_offset_pair: delays must be >= 0");
  }
  if (!(slot_duration_us > 0.0)) throw DomainError("slot_offset_pair: slot must be > 0");
  const double gap = sat_delay_us - bs_delay_us;
  double wrapped = std::fmod(gap, slot_duration_us);
  if (wrapped < 0.0) wrapped += slot_duration_us;
  SlotOffset out;
  out.sat_slot_shift = static_cast<std::int64_t>(std::llround((gap - wrapped) / slot_duration_us));
  const double coarse = static_cast<double>(out.sat_slot_shift) * slot_duration_us;
  out.sat_fine_advance_us = gap - coarse;
  out.arrival_difference_us = gap - coarse - out.sat_fine_advance_us;
  return out;
}

struct AlignmentReport {
  double ntn_common_advance_us = 0.0;
  double tn_common_advance_us = 0.0;
  std::vector<double> ntn_residuals_us;
  std::vector<double> tn_residuals_us;
  SlotOffset cross_domain{};
  /// Largest arrival-time gap between any two streams after compensation.
  double max_residual_us = 0.0;
  bool aligned = true;
};

/// NTN cluster compensated by the control satellite, TN set by the TN CPU,
/// then the two domain references are tied together with slot_offset_pair.
inline AlignmentReport msmbs_alignment(std::span<const double> sat_delays_us,
                                       std::span<const double> bs_delays_us,
                                       const SyncConfig& config) {
  if (sat_delays_us.empty() && bs_delays_us.empty()) {
    throw DomainError("msmbs_alignment: no delays given");
  }
  AlignmentReport r;
  std::vector<double> arrivals;
  if (!sat_delays_us.empty()) {
    auto ntn = cluster_compensation(sat_delays_us);
    r.ntn_common_advance_us = ntn.common_advance_us;
    r.ntn_residuals_us = std::move(ntn.residuals_us);
  }
  if (!bs_delays_us.empty()) {
    auto tn = cluster_compensation(bs_delays_us);
    r.tn_common_advance_us = tn.common_advance_us;
    r.tn_residuals_us = std::move(tn.residuals_us);
  }
  double ntn_offset = 0.0;
  if (!sat_delays_us.empty() && !bs_delays_us.empty()) {
    r.cross_domain = slot_offset_pair(r.ntn_common_advance_us, r.tn_common_advance_us,
                                      config.slot_duration_us);
    ntn_offset = r.cross_domain.arrival_difference_us;
  }
  for (double x : r.ntn_residuals_us) arrivals.push_back(x + ntn_offset);
  for (double x : r.tn_residuals_us) arrivals.push_back(x);
  const auto [lo, hi] = std::minmax_element(arrivals.begin(), arrivals.end());
  r.max_residual_us = *hi - *lo;
  r.aligned = r.max_residual_us <= config.cp_length_us;
  return r;
}

}  // namespace stinsim
