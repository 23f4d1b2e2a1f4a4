#include "stinsim/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_support.hpp"

namespace stinsim {
namespace {

constexpr double kRe = 6371.0;

// Independent arbitrary-precision values for the shell/cap geometry.
constexpr double kFig3ExpectedCount = 5932.66411747460359;
constexpr double kFig6ExpectedCount = 296.633205873730180;
constexpr double kElevationAtTenDegreeCentralAngle = 18.3442215295700731;
constexpr double kHorizonSlantRange = 2573.13038923409398;
constexpr double kVisibleFractionAtZeroDeg = 0.0363848057051375346;

Position3D on_shell(double central_angle_deg, double altitude_km) {
  const double r = kRe + altitude_km;
  const double psi = deg_to_rad(central_angle_deg);
  return {r * std::sin(psi), 0.0, r * std::cos(psi)};
}

TEST(SampleShell, ZeroDensityIsEmpty) {
  RandomEngine rng(1);
  EXPECT_TRUE(sample_shell(ShellConfig{.altitude_km = 500, .density_per_km2 = 0.0}, rng).empty());
}

TEST(SampleShell, ExpectedCountMatchesArithmeticOracle) {
  EXPECT_NEAR((ShellConfig{.altitude_km = 500, .density_per_km2 = 1e-5}).expected_count(),
              kFig3ExpectedCount, 1e-9);
  EXPECT_NEAR((ShellConfig{.altitude_km = 500, .density_per_km2 = 5e-7}).expected_count(),
              kFig6ExpectedCount, 1e-9);
}

TEST(SampleShell, MeanCountWithinThreeStandardErrors) {
  const ShellConfig shell{.altitude_km = 500, .density_per_km2 = 5e-7};
  RandomEngine rng(7);
  const int draws = 10000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(sample_shell(shell, rng).size());
  const double se = std::sqrt(kFig6ExpectedCount / draws);
  EXPECT_NEAR(sum / draws, kFig6ExpectedCount, 3.0 * se);
}

TEST(SampleShell, PointsLieOnShellAndZIsUniform) {
  const ShellConfig shell{.altitude_km = 500, .density_per_km2 = 1e-5};
  RandomEngine rng(11);
  const auto points = sample_shell(shell, rng);
  ASSERT_GT(points.size(), 5000u);
  std::vector<double> z;
  for (const auto& p : points) {
    EXPECT_NEAR(p.norm(), shell.radius_km(), 1e-6);
    z.push_back(p.z / shell.radius_km());
  }
  const double d = testing::one_sample_ks(z, [](double x) { return (x + 1.0) / 2.0; });
  EXPECT_LT(d, testing::ks_critical(z.size(), 0.01));
}

TEST(SampleShell, SameSeedReproducesBitForBit) {
  const ShellConfig shell{.altitude_km = 500, .density_per_km2 = 1e-6};
  RandomEngine a(42);
  RandomEngine b(42);
  EXPECT_EQ(sample_shell(shell, a), sample_shell(shell, b));
}

TEST(SampleShell, RejectsInvalidShell) {
  RandomEngine rng(1);
  EXPECT_THROW(sample_shell(ShellConfig{.altitude_km = -1}, rng), DomainError);
  EXPECT_THROW(sample_shell(ShellConfig{.altitude_km = 500, .density_per_km2 = -1}, rng), DomainError);
  EXPECT_THROW(sample_shell(ShellConfig{.altitude_km = 500, .min_elevation_deg = 90}, rng), DomainError);
}

TEST(SampleRegion, MeanBsCountIsLambdaTimesArea) {
  const RegionConfig region{.side_km = 50, .bs_density_per_km2 = 6e-3, .bs_service_radius_km = 8,
                            .ue_density_per_km2 = 0, .ues_per_cell = 4};
  RandomEngine rng(3);
  const int draws = 10000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(sample_region(region, rng).bs_positions.size());
  EXPECT_NEAR(sum / draws, 15.0, 3.0 * std::sqrt(15.0 / draws));
}

TEST(SampleRegion, NoBaseStationsFallsBackToUniformUes) {
  const RegionConfig region{.side_km = 50, .bs_density_per_km2 = 0.0, .ues_per_cell = 3};
  RandomEngine rng(5);
  const auto set = sample_region(region, rng);
  EXPECT_TRUE(set.bs_positions.empty());
  ASSERT_EQ(set.ue_positions.size(), 3u);
  for (std::size_t i = 0; i < set.ue_positions.size(); ++i) {
    EXPECT_EQ(set.ue_cell[i], -1);
    EXPECT_LE(std::abs(set.ue_positions[i].x), 25.0);
    EXPECT_LE(std::abs(set.ue_positions[i].y), 25.0);
  }
}

TEST(SampleRegion, FourUesInsideTheirCell) {
  // lambda * area = 1: plenty of single-BS draws.
  const RegionConfig region{.side_km = 50, .bs_density_per_km2 = 1.0 / 2500.0,
                            .bs_service_radius_km = 8, .ues_per_cell = 4};
  RandomEngine rng(9);
  int single_bs_draws = 0;
  for (int i = 0; i < 500; ++i) {
    const auto set = sample_region(region, rng);
    ASSERT_EQ(set.ue_positions.size(), std::max<std::size_t>(set.bs_positions.size(), 1) * 4);
    for (std::size_t u = 0; u < set.ue_positions.size() && !set.bs_positions.empty(); ++u) {
      const auto& bs = set.bs_positions[static_cast<std::size_t>(set.ue_cell[u])];
      EXPECT_LE(planar_distance(bs, set.ue_positions[u]), 8.0);
    }
    if (set.bs_positions.size() == 1) {
      ++single_bs_draws;
      EXPECT_EQ(set.ue_positions.size(), 4u);
      EXPECT_EQ(set.typical_ue, 0u);
    }
  }
  EXPECT_GT(single_bs_draws, 100);
}

TEST(ElevationAngle, ZenithHorizonAndOracle) {
  const Position3D ue{0, 0, kRe};
  EXPECT_NEAR(elevation_angle(ue, on_shell(0.0, 500)), 90.0, 1e-9);
  const double horizon = rad_to_deg(std::acos(kRe / (kRe + 500.0)));
  EXPECT_NEAR(elevation_angle(ue, on_shell(horizon, 500)), 0.0, 1e-9);
  EXPECT_NEAR(elevation_angle(ue, on_shell(10.0, 500)), kElevationAtTenDegreeCentralAngle, 1e-9);
  EXPECT_LT(elevation_angle(ue, on_shell(40.0, 500)), 0.0);
}

TEST(VisibleSatellites, ThresholdSemantics) {
  const Position3D ue{0, 0, kRe};
  // Central angle giving -5 deg elevation at 500 km, solved by bisection on the oracle geometry.
  double lo = 22.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (elevation_angle(ue, on_shell(mid, 500)) > -5.0 ? lo : hi) = mid;
  }
  Constellation c;
  c.shells.push_back({ShellConfig{.altitude_km = 500}, {on_shell(0.0, 500), on_shell(lo, 500)}});
  EXPECT_EQ(visible_satellites(c, ue, 10.0), (std::vector<std::size_t>{0}));
  EXPECT_EQ(visible_satellites(c, ue, 0.0), (std::vector<std::size_t>{0}));
}

TEST(VisibleSatellites, MonotoneInThreshold) {
  RandomEngine rng(21);
  Constellation c;
  const ShellConfig shell{.altitude_km = 500, .density_per_km2 = 1e-5};
  c.shells.push_back({shell, sample_shell(shell, rng)});
  const Position3D ue{0, 0, kRe};
  std::size_t previous = c.size();
  for (double t = 0.0; t < 90.0; t += 2.5) {
    const auto v = visible_satellites(c, ue, t);
    EXPECT_LE(v.size(), previous);
    previous = v.size();
  }
}

TEST(VisibleSatellites, VisibleFractionMatchesCapArea) {
  const ShellConfig shell{.altitude_km = 500, .density_per_km2 = 5e-7};
  RandomEngine rng(33);
  const Position3D ue{0, 0, kRe};
  double visible = 0.0;
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Constellation c;
    c.shells.push_back({shell, sample_shell(shell, rng)});
    visible += static_cast<double>(visible_satellites(c, ue, 0.0).size());
    total += static_cast<double>(c.size());
  }
  const double p = kVisibleFractionAtZeroDeg;
  EXPECT_NEAR(visible / total, p, 3.0 * std::sqrt(p * (1 - p) / total));
}

TEST(SlantRange, ZenithHorizonSymmetry) {
  const Position3D ue{0, 0, kRe};
  EXPECT_NEAR(slant_range(ue, on_shell(0.0, 500)), 500.0, 1e-9);
  const double horizon = rad_to_deg(std::acos(kRe / (kRe + 500.0)));
  EXPECT_NEAR(slant_range(ue, on_shell(horizon, 500)), kHorizonSlantRange, 1e-6);
  const auto sat = on_shell(7.0, 500);
  EXPECT_EQ(slant_range(ue, sat), slant_range(sat, ue));
}

TEST(SlantRange, StrictlyDecreasingInElevation) {
  const Position3D ue{0, 0, kRe};
  double prev_elev = -1e9;
  double prev_range = 1e9;
  for (double psi = 22.0; psi >= 0.0; psi -= 0.5) {
    const auto sat = on_shell(psi, 500);
    const double e = elevation_angle(ue, sat);
    const double r = slant_range(ue, sat);
    EXPECT_GT(e, prev_elev);
    EXPECT_LT(r, prev_range);
    prev_elev = e;
    prev_range = r;
  }
}

TEST(Footprint, CentralAngleMatchesOracle) {
  EXPECT_NEAR(rad_to_deg(footprint_central_angle_rad(ShellConfig{.altitude_km = 500})),
              14.0565352140267674, 1e-9);
}

}  // namespace
}  // namespace stinsim
