#pragma once

// Point-process sampling of satellite shells and terrestrial deployments,
// plus the spherical-Earth visibility/distance helpers built on top of them.
//
// Satellites use an Earth-centred frame (km). The terrestrial region is a
// small square on a tangent plane; the typical UE sits at the tangent point,
// which maps to the north pole (0, 0, R_E) of the Earth frame. Satellite
// processes are isotropic, so pinning the UE there loses nothing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stinsim/error.hpp"
#include "stinsim/random.hpp"
#include "stinsim/units.hpp"

namespace stinsim {

struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  friend Position3D operator-(const Position3D& a, const Position3D& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend double dot(const Position3D& a, const Position3D& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
  }
  friend bool operator==(const Position3D&, const Position3D&) = default;
};

/// Planar point on the local tangent plane of the study region (km).
struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline double planar_distance(const Point2D& a, const Point2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct ShellConfig {
  double altitude_km = 500.0;
  double density_per_km2 = 0.0;
  double earth_radius_km = kDefaultEarthRadiusKm;
  double min_elevation_deg = 10.0;

  double radius_km() const { return earth_radius_km + altitude_km; }
  double area_km2() const { return 4.0 * std::numbers::pi * radius_km() * radius_km(); }
  double expected_count() const { return density_per_km2 * area_km2(); }

  void validate() const {
    if (!(altitude_km > 0.0)) throw DomainError("shell altitude_km must be > 0");
    if (!(density_per_km2 >= 0.0)) throw DomainError("shell density_per_km2 must be >= 0");
    if (!(earth_radius_km > 0.0)) throw DomainError("earth_radius_km must be > 0");
    if (!(min_elevation_deg >= 0.0 && min_elevation_deg < 90.0)) {
      throw DomainError("min_elevation_deg must lie in [0, 90)");
    }
  }
};

struct RegionConfig {
  double side_km = 50.0;
  double bs_density_per_km2 = 0.0;
  double bs_service_radius_km = 8.0;
  double ue_density_per_km2 = 0.0;
  std::size_t ues_per_cell = 1;

  double area_km2() const { return side_km * side_km; }

  void validate() const {
    if (!(side_km > 0.0)) throw DomainError("region side_km must be > 0");
    if (!(bs_density_per_km2 >= 0.0)) throw DomainError("bs_density_per_km2 must be >= 0");
    if (!(bs_service_radius_km > 0.0)) throw DomainError("bs_service_radius_km must be > 0");
    if (!(ue_density_per_km2 >= 0.0)) throw DomainError("ue_density_per_km2 must be >= 0");
    if (ues_per_cell < 1) throw DomainError("ues_per_cell must be >= 1");
  }
};

struct Shell {
  ShellConfig config;
  std::vector<Position3D> positions;
};

/// One or more shells (multi-tier). Satellites are addressed by a flat index
/// running shell by shell in declaration order.
struct Constellation {
  std::vector<Shell> shells;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& s : shells) n += s.positions.size();
    return n;
  }

  std::vector<Position3D> flat_positions() const {
    std::vector<Position3D> out;
    out.reserve(size());
    for (const auto& s : shells) out.insert(out.end(), s.positions.begin(), s.positions.end());
    return out;
  }
};

/// Terrestrial snapshot: BSs uniform in the square, UEs clustered in BS disks.
struct TerrestrialSet {
  std::vector<Point2D> bs_positions;
  std::vector<Point2D> ue_positions;
  /// Serving-cell index of each UE, or -1 when placed without a BS.
  std::vector<long> ue_cell;
  std::size_t typical_ue = 0;

  const Point2D& typical() const { return ue_positions.at(typical_ue); }
};

/// Homogeneous Poisson point process on the sphere of radius R_E + H.
/// Uses the hat-box property: z uniform on [-r, r] with uniform azimuth.
inline std::vector<Position3D> sample_shell(const ShellConfig& shell, RandomEngine& rng) {
  shell.validate();
  std::vector<Position3D> points;
  const double mean = shell.expected_count();
  if (mean <= 0.0) return points;

  const auto count = std::poisson_distribution<long long>(mean)(rng);
  const double r = shell.radius_km();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  points.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    const double z = r * (2.0 * unit(rng) - 1.0);
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double rho = std::sqrt(std::max(0.0, r * r - z * z));
    points.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return points;
}

inline Point2D uniform_in_disk(const Point2D& centre, double radius, RandomEngine& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  return {centre.x + r * std::cos(phi), centre.y + r * std::sin(phi)};
}

/// BSs ~ PPP(lambda_T) on [-side/2, side/2]^2; `ues_per_cell` UEs uniform in
/// each BS service disk. The typical UE is the first UE of the first BS
/// (BS order is already random). With no BS the UEs fall back to uniform
/// placement in the square.
inline TerrestrialSet sample_region(const RegionConfig& region, RandomEngine& rng) {
  region.validate();
  TerrestrialSet out;
  const double half = region.side_km / 2.0;
  std::uniform_real_distribution<double> coord(-half, half);

  const double mean_bs = region.bs_density_per_km2 * region.area_km2();
  const long long n_bs = mean_bs > 0.0 ? std::poisson_distribution<long long>(mean_bs)(rng) : 0;
  out.bs_positions.reserve(static_cast<std::size_t>(n_bs));
  for (long long i = 0; i < n_bs; ++i) out.bs_positions.push_back({coord(rng), coord(rng)});

  if (out.bs_positions.empty()) {
    for (std::size_t k = 0; k < region.ues_per_cell; ++k) {
      out.ue_positions.push_back({coord(rng), coord(rng)});
      out.ue_cell.push_back(-1);
    }
  } else {
    for (std::size_t b = 0; b < out.bs_positions.size(); ++b) {
      for (std::size_t k = 0; k < region.ues_per_cell; ++k) {
        out.ue_positions.push_back(
            uniform_in_disk(out.bs_positions[b], region.bs_service_radius_km, rng));
        out.ue_cell.push_back(static_cast<long>(b));
      }
    }
  }
  out.typical_ue = 0;
  return out;
}

/// Earth-frame position of the typical UE (tangent point of the region).
inline Position3D typical_ue_position(double earth_radius_km) { return {0.0, 0.0, earth_radius_km}; }

inline double slant_range(const Position3D& a, const Position3D& b) { return (a - b).norm(); }

/// Angle between the UE's local horizontal plane and the UE->satellite ray.
inline double elevation_angle(const Position3D& ue, const Position3D& sat) {
  const Position3D ray = sat - ue;
  const double range = ray.norm();
  const double ue_norm = ue.norm();
  if (range == 0.0 || ue_norm == 0.0) throw DomainError("elevation_angle: degenerate geometry");
  const double s = std::clamp(dot(ue, ray) / (ue_norm * range), -1.0, 1.0);
  return rad_to_deg(std::asin(s));
}

/// Flat indices of satellites at or above the elevation threshold.
inline std::vector<std::size_t> visible_satellites(const Constellation& constellation,
                                                   const Position3D& ue,
                                                   double min_elevation_deg) {
  std::vector<std::size_t> visible;
  std::size_t index = 0;
  for (const auto& shell : constellation.shells) {
    for (const auto& p : shell.positions) {
      if (elevation_angle(ue, p) >= min_elevation_deg) visible.push_back(index);
      ++index;
    }
  }
  return visible;
}

/// Earth-centred angle subtended by the visibility cap of a shell.
inline double footprint_central_angle_rad(const ShellConfig& shell) {
  const double eps = deg_to_rad(shell.min_elevation_deg);
  return std::acos(shell.earth_radius_km / shell.radius_km() * std::cos(eps)) - eps;
}

/// Ground area of the spherical cap from which a satellite is seen above the
/// elevation threshold.
inline double footprint_area_km2(const ShellConfig& shell) {
  const double psi = footprint_central_angle_rad(shell);
  return 2.0 * std::numbers::pi * shell.earth_radius_km * shell.earth_radius_km *
         (1.0 - std::cos(psi));
}

}  // namespace stinsim
