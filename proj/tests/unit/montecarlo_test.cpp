#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "ntgof/error.hpp"
#include "ntgof/montecarlo.hpp"

namespace {

using ntgof::MonteCarloConfig;
using ntgof::TestSpec;

MonteCarloConfig config_with(std::size_t reps, std::uint64_t seed,
                             std::vector<std::size_t> grid = {}) {
  MonteCarloConfig config;
  config.replications = reps;
  config.seed = seed;
  config.n_grid = std::move(grid);
  return config;
}

TEST(NullDistribution, Bookkeeping) {
  const auto result = ntgof::null_distribution(TestSpec::uniformity(), 50, config_with(100, 1));
  EXPECT_EQ(result.statistics.size(), 100u);
  EXPECT_EQ(std::accumulate(result.selected_counts.begin(), result.selected_counts.end(),
                            std::size_t{0}),
            100u);
  EXPECT_TRUE(std::is_sorted(result.statistics.begin(), result.statistics.end()));
  EXPECT_EQ(result.critical_value, result.statistics[94]);
}

TEST(NullDistribution, CriticalRank) {
  EXPECT_EQ(ntgof::critical_rank(0.05, 100), 95u);
  EXPECT_EQ(ntgof::critical_rank(0.05, 1000), 950u);
  EXPECT_EQ(ntgof::critical_rank(0.05, 2001), 1901u);
  EXPECT_EQ(ntgof::critical_rank(0.5, 101), 51u);
}

TEST(NullDistribution, DeterministicAcrossRunsAndWorkers) {
  auto one = config_with(300, 9);
  one.workers = 1;
  auto four = one;
  four.workers = 4;
  const auto spec = TestSpec::independence();
  const auto a = ntgof::null_distribution(spec, 60, one);
  const auto b = ntgof::null_distribution(spec, 60, one);
  const auto c = ntgof::null_distribution(spec, 60, four);
  EXPECT_EQ(a.statistics, b.statistics);
  EXPECT_EQ(a.statistics, c.statistics);
  EXPECT_EQ(a.selected_counts, c.selected_counts);
}

TEST(NullDistribution, SchwarzConcentratesAtOne) {
  const auto result = ntgof::null_distribution(TestSpec::uniformity(), 500, config_with(5000, 17));
  EXPECT_GT(result.selected_counts[0] / 5000.0, 0.90);
}

TEST(NullDistribution, ConfigValidation) {
  EXPECT_THROW(ntgof::null_distribution(TestSpec::uniformity(), 50, config_with(99, 1)),
               ntgof::InvalidArgument);
  auto bad_alpha = config_with(100, 1);
  bad_alpha.alpha = 1.0;
  EXPECT_THROW(bad_alpha.validate(), ntgof::InvalidArgument);
  EXPECT_THROW(config_with(100, 1, {20, 10}).validate(), ntgof::InvalidArgument);
}

TEST(NullDistribution, FailureCarriesReplicationIndex) {
  auto spec = TestSpec::composite(ntgof::ParametricFamily::exponential());
  spec.family->sample = [](ntgof::Rng&, std::span<const double>) { return 0.0; };
  try {
    ntgof::null_distribution(spec, 10, config_with(100, 1));
    FAIL() << "expected a numeric error";
  } catch (const ntgof::NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("replication 0"), std::string::npos);
  }
}

ntgof::CalibrationResult fake_calibration(std::vector<double> stats) {
  ntgof::CalibrationResult c;
  c.statistics = std::move(stats);
  c.replications = c.statistics.size();
  return c;
}

TEST(PValue, Cases) {
  const auto c = fake_calibration({1, 2, 3, 4, 5, 6, 7, 8, 9});
  EXPECT_DOUBLE_EQ(ntgof::p_value(100.0, c), 1.0 / 10.0);
  EXPECT_DOUBLE_EQ(ntgof::p_value(0.0, c), 1.0);
  EXPECT_NEAR(ntgof::p_value(5.0, c), 0.5, 1.0 / 9.0);
  EXPECT_THROW(ntgof::p_value(1.0, fake_calibration({})), ntgof::InvalidArgument);
}

TEST(PowerCurve, NullAlternativeHoldsSize) {
  const auto spec = TestSpec::uniformity();
  auto config = config_with(2000, 5, {100, 400});
  const auto curve = ntgof::power_curve(spec, ntgof::AlternativeSpec::null_of(spec, 1), config);
  for (const auto& p : curve) {
    EXPECT_NEAR(p.rejection_rate, 0.05, 3.0 * std::sqrt(0.05 * 0.95 / 2000)) << p.n;
  }
}

TEST(PowerCurve, ContaminationPowerGrows) {
  const auto curve = ntgof::power_curve(TestSpec::uniformity(),
                                        ntgof::AlternativeSpec::contamination(2, 0.3),
                                        config_with(2000, 6, {200, 800, 3200}));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_GE(curve[i].rejection_rate, curve[i - 1].rejection_rate);
  }
  EXPECT_GE(curve.back().rejection_rate, 0.9);
}

TEST(PowerCurve, OrthogonalContaminationStaysNearAlpha) {
  const auto spec = TestSpec::uniformity(ntgof::PenaltySchedule::schwarz(),
                                         ntgof::DimensionBudget::automatic(4));
  const auto curve = ntgof::power_curve(spec, ntgof::AlternativeSpec::contamination(6, 0.25),
                                        config_with(1000, 7, {200, 800}));
  for (const auto& p : curve) EXPECT_LT(p.rejection_rate, 0.12) << p.n;
}

TEST(ConsistencyProbe, KOneAlwaysDetected) {
  const auto report = ntgof::consistency_probe(TestSpec::uniformity(),
                                               ntgof::AlternativeSpec::contamination(1, 0.2),
                                               config_with(200, 3, {50, 100}));
  for (const auto& p : report.points) EXPECT_EQ(p.detection_rate, 1.0);
}

TEST(ConsistencyProbe, ThirdComponentDetected) {
  const auto report = ntgof::consistency_probe(TestSpec::uniformity(),
                                               ntgof::AlternativeSpec::contamination(3, 0.3),
                                               config_with(2000, 4, {200, 800, 3200}));
  EXPECT_TRUE(report.passed());
  EXPECT_GT(report.points.back().detection_rate, 0.8);
}

TEST(ConsistencyProbe, NullFailsForDeclaredTwo) {
  const auto spec = TestSpec::uniformity();
  const auto report = ntgof::consistency_probe(spec, ntgof::AlternativeSpec::null_of(spec, 2),
                                               config_with(500, 2, {200, 800}));
  EXPECT_FALSE(report.passed());
  EXPECT_LT(report.points.back().detection_rate, 0.2);
}

TEST(TailRate, Cases) {
  const auto sampler = ntgof::rademacher_sampler();
  const auto zero = ntgof::tail_rate_probe(sampler, 0.0, {16, 32}, 1000, 1);
  for (const auto& p : zero.points) EXPECT_EQ(p.empirical_tail, 1.0);

  const auto beyond = ntgof::tail_rate_probe(sampler, 1.5, {16, 32}, 1000, 1);
  for (const auto& p : beyond.points) EXPECT_EQ(p.empirical_tail, 0.0);

  const auto report = ntgof::tail_rate_probe(sampler, 0.5, {16, 32, 64}, 100000, 1);
  EXPECT_TRUE(report.geometric);
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    EXPECT_GE(report.points[i - 1].empirical_tail, 2.0 * report.points[i].empirical_tail);
  }
  EXPECT_NEAR(report.points[0].reference_rate, std::exp(-16 * 0.25 / 2.0), 1e-15);
}

TEST(TailRate, WorkerCountIrrelevant) {
  const auto sampler = ntgof::rademacher_sampler();
  const auto a = ntgof::tail_rate_probe(sampler, 0.3, {16, 32}, 5000, 8, 2.0, 1);
  const auto b = ntgof::tail_rate_probe(sampler, 0.3, {16, 32}, 5000, 8, 2.0, 3);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].empirical_tail, b.points[i].empirical_tail);
  }
}

}  // namespace
