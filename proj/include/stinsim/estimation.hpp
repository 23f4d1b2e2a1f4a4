#pragma once

// Pilot assignment, least-squares channel estimation under pilot
// contamination, and the CDF distance used to compare received-signal
// distributions with ideal vs estimated CSI.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "stinsim/error.hpp"
#include "stinsim/random.hpp"
#include "stinsim/units.hpp"

namespace stinsim {

using ChannelVector = std::vector<std::complex<double>>;

struct PilotConfig {
  int num_pilots = 1;
  double pilot_snr_dB = 10.0;  ///< +inf disables estimation noise
  int num_ues = 1;
  int antennas = 4;

  void validate() const {
    if (num_pilots < 1) throw DomainError("num_pilots must be >= 1");
    if (num_ues < 1) throw DomainError("num_ues must be >= 1");
    if (antennas < 1) throw DomainError("antennas must be >= 1");
    if (std::isnan(pilot_snr_dB)) throw DomainError("pilot_snr_dB must not be NaN");
  }
};

/// Per-antenna estimation-noise variance for a unit-variance channel.
inline double pilot_noise_variance(double pilot_snr_dB) {
  if (pilot_snr_dB == std::numeric_limits<double>::infinity()) return 0.0;
  return db_to_linear(-pilot_snr_dB);
}

/// Orthogonal (distinct, random) pilots when there are enough of them;
/// otherwise each UE picks floor(u * N_p) from its own uniform u, so the
/// co-pilot sets for N_p and 2 N_p are nested under the same stream.
inline std::vector<int> assign_pilots(int num_ues, int num_pilots, RandomEngine& rng) {
  if (num_ues < 1 || num_pilots < 1) throw DomainError("assign_pilots: counts must be >= 1");
  std::vector<int> assignment(static_cast<std::size_t>(num_ues));
  if (num_pilots >= num_ues) {
    std::vector<int> pool(static_cast<std::size_t>(num_pilots));
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::copy_n(pool.begin(), num_ues, assignment.begin());
    return assignment;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& pilot : assignment) {
    pilot = std::min(num_pilots - 1, static_cast<int>(unit(rng) * num_pilots));
  }
  return assignment;
}

inline double squared_norm(const ChannelVector& h) {
  double s = 0.0;
  for (const auto& c : h) s += std::norm(c);
  return s;
}

inline std::complex<double> inner(const ChannelVector& a, const ChannelVector& b) {
  std::complex<double> s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline std::complex<double> complex_gaussian(double variance, std::normal_distribution<double>& n,
                                             RandomEngine& rng) {
  const double s = std::sqrt(variance / 2.0);
  const double re = n(rng);
  const double im = n(rng);
  return {s * re, s * im};
}

/// Channel with an isotropic direction and Nakagami-m power: ||h||^2 equals
/// antennas * Gamma(m, 1/m), so each entry has unit average power.
inline ChannelVector sample_channel(int antennas, double nakagami_m, RandomEngine& rng) {
  if (antennas < 1) throw DomainError("sample_channel: antennas must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  ChannelVector h(static_cast<std::size_t>(antennas));
  for (auto& c : h) c = complex_gaussian(1.0, normal, rng);
  const double direction_norm = std::sqrt(squared_norm(h));
  const double power = std::gamma_distribution<double>(nakagami_m, 1.0 / nakagami_m)(rng);
  const double scale = std::sqrt(antennas * power) / direction_norm;
  for (auto& c : h) c *= scale;
  return h;
}

/// Least-squares estimate after despreading: every UE sees the superposition
/// of all channels that share its pilot plus white estimation noise.
/// Noise is drawn for every UE in order regardless of the assignment.
inline std::vector<ChannelVector> estimate_channel(std::span<const ChannelVector> true_channels,
                                                   std::span<const int> assignment,
                                                   double pilot_snr_dB, RandomEngine& rng) {
  if (true_channels.size() != assignment.size()) {
    throw DomainError("estimate_channel: channel and assignment counts differ");
  }
  if (true_channels.empty()) return {};
  const std::size_t dim = true_channels.front().size();
  int max_pilot = 0;
  for (std::size_t u = 0; u < true_channels.size(); ++u) {
    if (true_channels[u].size() != dim) {
      throw DomainError("estimate_channel: channel vectors have mismatched dimensions");
    }
    if (assignment[u] < 0) throw DomainError("estimate_channel: negative pilot index");
    max_pilot = std::max(max_pilot, assignment[u]);
  }

  std::vector<ChannelVector> pilot_sum(static_cast<std::size_t>(max_pilot) + 1, ChannelVector(dim));
  for (std::size_t u = 0; u < true_channels.size(); ++u) {
    auto& acc = pilot_sum[static_cast<std::size_t>(assignment[u])];
    for (std::size_t a = 0; a < dim; ++a) acc[a] += true_channels[u][a];
  }

  const double variance = pilot_noise_variance(pilot_snr_dB);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ChannelVector> estimates;
  estimates.reserve(true_channels.size());
  for (std::size_t u = 0; u < true_channels.size(); ++u) {
    ChannelVector est = pilot_sum[static_cast<std::size_t>(assignment[u])];
    for (auto& c : est) c += complex_gaussian(variance, normal, rng);
    estimates.push_back(std::move(est));
  }
  return estimates;
}

/// Received power |h^H w|^2 with maximum-ratio weight w = used / ||used||.
inline double beamformed_signal_sample(const ChannelVector& channel_true,
                                       const ChannelVector& channel_used) {
  if (channel_true.size() != channel_used.size()) {
    throw DomainError("beamformed_signal_sample: dimension mismatch");
  }
  const double used_norm2 = squared_norm(channel_used);
  if (used_norm2 == 0.0) return 0.0;
  return std::norm(inner(channel_true, channel_used)) / used_norm2;
}

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
inline double cdf_discrepancy(std::span<const double> samples_a, std::span<const double> samples_b) {
  if (samples_a.empty() || samples_b.empty()) {
    throw DomainError("cdf_discrepancy: both sample sets must be non-empty");
  }
  std::vector<double> a(samples_a.begin(), samples_a.end());
  std::vector<double> b(samples_b.begin(), samples_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // Step past every copy of the smallest pending value in both samples so
    // ties are compared only after both CDFs have jumped.
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace stinsim
