#include "stinsim/engine.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace stinsim {
namespace {

ExperimentConfig small_fig6(std::size_t trials) {
  auto c = preset("fig6");
  c.n_trials = trials;
  return c;
}

TEST(Presets, ReferenceParameters) {
  const auto f3 = preset("fig3_beamforming");
  EXPECT_EQ(f3.scenario, Scenario::kFig3Beamforming);
  EXPECT_EQ(f3.shells.at(0).density_per_km2, 1e-5);
  EXPECT_EQ(f3.shells.at(0).altitude_km, 500.0);
  EXPECT_EQ(f3.ntn.tx_power_dBm, 50.0);
  EXPECT_EQ(f3.ntn.mainlobe_gain_dBi, 30.0);
  EXPECT_EQ(f3.ntn.sidelobe_gain_dBi, 10.0);
  EXPECT_EQ(f3.ntn.rx_gain_dBi, 10.0);
  EXPECT_EQ(f3.region.ue_density_per_km2, 4e-6);
  EXPECT_EQ(f3.nakagami_grid, (std::vector<double>{1.0, 2.0, 5.0}));

  const auto f4 = preset("fig4");
  EXPECT_EQ(f4.scenario, Scenario::kFig4Pilots);
  EXPECT_EQ(f4.pilot_grid, (std::vector<int>{1, 2, 4, 8, 16}));
  EXPECT_GE(f4.pilot_seeds, 20);

  const auto f6 = preset("fig6_mc_vs_sc");
  EXPECT_EQ(f6.shells.at(0).density_per_km2, 5e-7);
  EXPECT_EQ(f6.region.bs_density_per_km2, 6e-3);
  EXPECT_EQ(f6.region.bs_service_radius_km, 8.0);
  EXPECT_EQ(f6.region.ues_per_cell, 4u);
  EXPECT_EQ(f6.tn.tx_power_dBm, 46.0);
  EXPECT_EQ(f6.tn.pathloss_exponent, 3.5);
  EXPECT_EQ(f6.noise.noise_power_dBm, -110.0);
  EXPECT_EQ(f6.n_trials, 10000u);

  EXPECT_THROW(preset("fig9"), DomainError);
}

TEST(RunTrial, DeterministicInSeedAndIndex) {
  const auto c = small_fig6(10);
  for (std::uint64_t i = 0; i < 10; ++i) EXPECT_EQ(run_trial(c, i), run_trial(c, i));
  auto other = c;
  other.master_seed += 1;
  int differing = 0;
  for (std::uint64_t i = 0; i < 10; ++i) differing += !(run_trial(c, i) == run_trial(other, i));
  EXPECT_GT(differing, 5);
}

TEST(RunTrials, ParallelMatchesSerial) {
  const auto c = small_fig6(400);
  EXPECT_EQ(run_trials(c, 1), run_trials(c, 4));
}

TEST(RunTrials, PairedOrderingHoldsTrialByTrial) {
  const auto trials = run_trials(small_fig6(2000));
  for (const auto& t : trials) {
    EXPECT_GE(t.sinr_of(Scheme::kMultiConnectivity), t.sinr_of(Scheme::kSatelliteOnly));
    EXPECT_GE(t.sinr_of(Scheme::kMultiConnectivity), t.sinr_of(Scheme::kBaseStationOnly));
    for (auto s : kAllSchemes) EXPECT_GE(t.sinr_of(s, true), t.sinr_of(s, false));
  }
}

TEST(RunTrials, NoSatellitesReducesMcToBaseStationOnly) {
  auto c = small_fig6(300);
  c.shells[0].density_per_km2 = 0.0;
  for (const auto& t : run_trials(c)) {
    EXPECT_EQ(t.sinr_of(Scheme::kSatelliteOnly), 0.0);
    EXPECT_EQ(t.sinr_of(Scheme::kMultiConnectivity), t.sinr_of(Scheme::kBaseStationOnly));
    EXPECT_NE(t.mode, Mode::kMode1);
    EXPECT_NE(t.mode, Mode::kMode2);
  }
}

TEST(EvaluateWorld, HandcraftedZenithSatelliteAndNearbyBs) {
  // Satellite overhead at 500 km, one BS 3 km away, fading pinned near 1.
  auto c = preset("fig6");
  c.ntn.nakagami_m = 1e6;
  c.tn.nakagami_m = 1e6;
  World w;
  w.constellation.shells.push_back({c.shells[0], {{0.0, 0.0, c.shells[0].radius_km()}}});
  w.terrestrial.bs_positions = {{3.0, 0.0}};
  w.terrestrial.ue_positions = {{0.0, 0.0}};
  w.terrestrial.ue_cell = {0};
  const ResolvedLinks links(c);
  const auto r = evaluate_world(c, links, w, 0);
  EXPECT_EQ(r.mode, Mode::kMode1);
  EXPECT_NEAR(r.sinr_of(Scheme::kMultiConnectivity) / 69026.93432, 1.0, 0.01);
  EXPECT_NEAR(r.sinr_of(Scheme::kSatelliteOnly) / 4.698384224, 1.0, 0.01);
  EXPECT_NEAR(r.sinr_of(Scheme::kBaseStationOnly) / 21.24482802, 1.0, 0.01);
  EXPECT_NEAR(r.sinr_of(Scheme::kMultiConnectivity, false) / 12681.74112, 1.0, 0.01);
  ASSERT_TRUE(r.sync_residual_us.has_value());
  EXPECT_TRUE(r.sync_aligned);
}

TEST(Coverage, VacuousThresholdIsCertain) {
  auto c = small_fig6(200);
  c.sinr_thresholds_dB = {-std::numeric_limits<double>::infinity(), 0.0};
  for (auto s : kAllSchemes) EXPECT_EQ(coverage_curve(c, s).front().p_hat, 1.0);
}

TEST(Coverage, CurvesAreNonincreasing) {
  const auto trials = run_trials(small_fig6(1000));
  const auto grid = threshold_range(-10.0, 20.0, 1.0);
  for (auto s : kAllSchemes) {
    const auto curve = coverage_from_trials(trials, s, true, grid);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i].p_hat, curve[i - 1].p_hat);
  }
}

TEST(Coverage, RejectsTooFewTrials) {
  EXPECT_THROW(coverage_curve(small_fig6(50), Scheme::kMultiConnectivity), DomainError);
}

TEST(Coverage, SingleZenithLinkMatchesGammaTail) {
  for (double m : {1.0, 2.0, 5.0}) {
    auto c = small_fig6(4000);
    c.layout = SatelliteLayout::kZenith;
    c.region.bs_density_per_km2 = 0.0;
    c.noise.noise_power_dBm = -75.0;
    c.ntn.nakagami_m = m;
    const double mean_snr = ResolvedLinks(c).ntn.mean_power_mw(500.0, LinkRole::kServing, true) /
                            c.noise.noise_mw();
    for (const auto& pt : coverage_curve(c, Scheme::kMultiConnectivity)) {
      const double expected = boost::math::gamma_q(m, m * db_to_linear(pt.threshold_dB) / mean_snr);
      EXPECT_LE(std::abs(pt.p_hat - expected), 3.0 * (pt.ci_high - pt.ci_low))
          << "m=" << m << " tau=" << pt.threshold_dB;
    }
  }
}

TEST(Wilson, ContainsEstimateAndStaysInUnitInterval) {
  for (std::size_t n : {1u, 10u, 100u, 1000u}) {
    for (std::size_t k = 0; k <= n; k += std::max<std::size_t>(1, n / 10)) {
      const auto [lo, hi] = wilson_interval(k, n);
      const double p = static_cast<double>(k) / static_cast<double>(n);
      EXPECT_LE(0.0, lo);
      EXPECT_LE(lo, p);
      EXPECT_LE(p, hi);
      EXPECT_LE(hi, 1.0);
    }
  }
}

TEST(Wilson, KnownValue) {
  // 30 of 100, evaluated independently.
  const auto [lo, hi] = wilson_interval(30, 100);
  EXPECT_NEAR(lo, 0.2189488529, 1e-9);
  EXPECT_NEAR(hi, 0.3958485463, 1e-9);
}

TEST(Wilson, WidthShrinksAsInverseSquareRoot) {
  double prev = 0.0;
  for (std::size_t n : {1000u, 4000u, 16000u, 64000u}) {
    const auto [lo, hi] = wilson_interval(3 * n / 10, n);
    const double w = hi - lo;
    if (prev > 0.0) {
      EXPECT_NEAR(w / prev, 0.5, 0.01);
    }
    prev = w;
  }
}

TEST(Discrepancy, PerfectEstimationGivesZero) {
  auto c = preset("fig4");
  c.pilot_ues_from_density = false;
  c.pilots.num_ues = 1;
  c.pilots.pilot_snr_dB = std::numeric_limits<double>::infinity();
  c.n_trials = 500;
  c.pilot_seeds = 3;
  for (const auto& p : discrepancy_curve(c)) EXPECT_EQ(p.ks_mean, 0.0);
}

TEST(Discrepancy, SingleUeIsFlatAcrossPilotGrid) {
  auto c = preset("fig4");
  c.pilot_ues_from_density = false;
  c.pilots.num_ues = 1;
  c.n_trials = 500;
  c.pilot_seeds = 3;
  const auto curve = discrepancy_curve(c);
  for (const auto& p : curve) EXPECT_EQ(p.ks_mean, curve.front().ks_mean);
  EXPECT_GT(curve.front().ks_mean, 0.0);
}

TEST(Discrepancy, NonincreasingInPilotCount) {
  auto c = preset("fig4");
  c.n_trials = 600;
  c.pilot_seeds = 5;
  const auto curve = discrepancy_curve(c);
  ASSERT_EQ(curve.size(), 5u);
  for (std::size_t g = 1; g < curve.size(); ++g) EXPECT_LE(curve[g].ks_mean, curve[g - 1].ks_mean);
  for (const auto& p : curve) {
    EXPECT_LE(p.ci_low, p.ks_mean);
    EXPECT_GE(p.ci_high, p.ks_mean);
    EXPECT_EQ(p.seeds, 5);
  }
}

TEST(Discrepancy, ParallelMatchesSerial) {
  auto c = preset("fig4");
  c.n_trials = 200;
  c.pilot_seeds = 4;
  const auto a = discrepancy_curve(c, 1);
  const auto b = discrepancy_curve(c, 3);
  for (std::size_t g = 0; g < a.size(); ++g) EXPECT_EQ(a[g].ks_mean, b[g].ks_mean);
}

TEST(RunExperiment, CurveNamesPerScenario) {
  auto f3 = preset("fig3");
  f3.n_trials = 100;
  f3.shells[0].density_per_km2 = 1e-6;
  const auto r3 = run_experiment(f3);
  ASSERT_EQ(r3.coverage.size(), 6u);
  EXPECT_EQ(r3.coverage[0].name, "bf_m1");
  EXPECT_EQ(r3.coverage[1].name, "nobf_m1");
  EXPECT_EQ(r3.coverage[5].name, "nobf_m5");

  const auto r6 = run_experiment(small_fig6(100));
  ASSERT_EQ(r6.coverage.size(), 3u);
  EXPECT_EQ(r6.coverage[0].name, "mc");
  EXPECT_EQ(r6.coverage[1].name, "sc_sat");
  EXPECT_EQ(r6.coverage[2].name, "sc_bs");
  EXPECT_TRUE(r6.discrepancy.empty());
}

}  // namespace
}  // namespace stinsim
