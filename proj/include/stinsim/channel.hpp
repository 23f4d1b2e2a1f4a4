#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "stinsim/error.hpp"
#include "stinsim/random.hpp"
#include "stinsim/units.hpp"

namespace stinsim {

enum class LinkRole { kServing, kInterfering };

/// Per-domain radio parameters, kept in the dB domain as configured.
struct LinkParams {
  double tx_power_dBm = 0.0;
  double mainlobe_gain_dBi = 0.0;
  double sidelobe_gain_dBi = 0.0;
  double rx_gain_dBi = 0.0;
  double pathloss_exponent = 2.0;
  double carrier_frequency_GHz = 2.0;
  double nakagami_m = 1.0;
  int antennas = 1;

  void validate() const {
    if (!std::isfinite(tx_power_dBm)) throw DomainError("tx_power_dBm must be finite");
    if (!std::isfinite(mainlobe_gain_dBi) || !std::isfinite(sidelobe_gain_dBi) ||
        !std::isfinite(rx_gain_dBi)) {
      throw DomainError("antenna gains must be finite");
    }
    if (!(pathloss_exponent >= 2.0)) throw DomainError("pathloss_exponent must be >= 2");
    if (!(carrier_frequency_GHz > 0.0)) throw DomainError("carrier_frequency_GHz must be > 0");
    if (!(nakagami_m >= 0.5)) throw DomainError("nakagami_m must be >= 0.5");
    if (antennas < 1) throw DomainError("antennas must be >= 1");
  }
};

struct NoiseConfig {
  double noise_power_dBm = -110.0;

  double noise_mw() const { return dbm_to_mw(noise_power_dBm); }
};

struct FadingDraw {
  double power_gain = 1.0;
};

struct PathlossReference {
  double distance_km = 1.0;
  double gain = 1.0;  ///< linear free-space gain at distance_km
};

/// Friis free-space gain (lambda / (4 pi d))^2 at the reference distance.
inline PathlossReference free_space_reference(double carrier_frequency_GHz,
                                              double reference_distance_km = 1.0) {
  const double wavelength_m = kSpeedOfLightKmPerS * 1e3 / (carrier_frequency_GHz * 1e9);
  const double ratio = wavelength_m / (4.0 * std::numbers::pi * reference_distance_km * 1e3);
  return {reference_distance_km, ratio * ratio};
}

inline double pathloss_linear(double distance_km, double exponent, const PathlossReference& ref) {
  if (!(distance_km >= ref.distance_km)) {
    throw DomainError("pathloss_linear: distance " + std::to_string(distance_km) +
                      " km is below the reference distance " + std::to_string(ref.distance_km) +
                      " km");
  }
  return ref.gain * std::pow(distance_km / ref.distance_km, -exponent);
}

struct AntennaGains {
  double tx_dBi = 0.0;
  double rx_dBi = 0.0;

  friend bool operator==(const AntennaGains&, const AntennaGains&) = default;
};

/// Sectored gain model. With beamforming only the serving link sees the main
/// lobe; without it every transmitter radiates at side-lobe gain.
inline AntennaGains antenna_gain(LinkRole role, bool beamforming, const LinkParams& link) {
  const bool main_lobe = beamforming && role == LinkRole::kServing;
  return {main_lobe ? link.mainlobe_gain_dBi : link.sidelobe_gain_dBi, link.rx_gain_dBi};
}

/// Normalized Nakagami-m power gain: Gamma(shape m, scale 1/m), unit mean.
inline FadingDraw sample_fading(double m, RandomEngine& rng) {
  if (!(m >= 0.5)) throw DomainError("sample_fading: nakagami m must be >= 0.5");
  return {std::gamma_distribution<double>(m, 1.0 / m)(rng)};
}

/// LinkParams resolved to linear scale once; evaluates mean received power
/// (fading excluded) for any distance/role/beamforming combination.
class LinkBudget {
 public:
  LinkBudget() = default;
  explicit LinkBudget(const LinkParams& params)
      : params_(params),
        tx_mw_(dbm_to_mw(params.tx_power_dBm)),
        main_(db_to_linear(params.mainlobe_gain_dBi)),
        side_(db_to_linear(params.sidelobe_gain_dBi)),
        rx_(db_to_linear(params.rx_gain_dBi)),
        reference_(free_space_reference(params.carrier_frequency_GHz)) {
    params.validate();
  }

  const LinkParams& params() const { return params_; }
  const PathlossReference& reference() const { return reference_; }

  double tx_gain(LinkRole role, bool beamforming) const {
    return beamforming && role == LinkRole::kServing ? main_ : side_;
  }

  double mean_power_mw(double distance_km, LinkRole role, bool beamforming) const {
    return tx_mw_ * tx_gain(role, beamforming) * rx_ *
           pathloss_linear(distance_km, params_.pathloss_exponent, reference_);
  }

 private:
  LinkParams params_{};
  double tx_mw_ = 1.0;
  double main_ = 1.0;
  double side_ = 1.0;
  double rx_ = 1.0;
  PathlossReference reference_{};
};

/// P_rx = P_tx * g_tx * g_rx * PL(d) * fading, in mW.
inline double received_power_linear(const LinkParams& link, double distance_km,
                                    const FadingDraw& fading, LinkRole role, bool beamforming) {
  return LinkBudget(link).mean_power_mw(distance_km, role, beamforming) * fading.power_gain;
}

}  // namespace stinsim
