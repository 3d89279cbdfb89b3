#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ntgof/basis.hpp"
#include "ntgof/error.hpp"
#include "ntgof/random.hpp"
#include "ntgof/selection.hpp"

namespace {

using ntgof::DimensionBudget;
using ntgof::PenaltySchedule;

const double kE = std::exp(1.0);

TEST(SchwarzPenalty, Values) {
  EXPECT_NEAR(ntgof::schwarz_penalty(1, kE), 1.0, 1e-15);
  EXPECT_NEAR(ntgof::schwarz_penalty(3, 100), 13.8155106, 1e-7);
  EXPECT_NEAR(ntgof::schwarz_penalty(2, 2), 1.3862944, 1e-7);
  EXPECT_THROW(ntgof::schwarz_penalty(1, 1.5), ntgof::InvalidArgument);
}

TEST(Select, Singleton) {
  const std::vector<double> series{42.0};
  const auto out = ntgof::select_dimension(series, PenaltySchedule::schwarz(), 50);
  EXPECT_EQ(out.selected, 1u);
  EXPECT_EQ(out.statistic, 42.0);
}

TEST(Select, TieGoesToSmallestIndex) {
  // Built so the two penalized values are bit-equal.
  const auto penalty = PenaltySchedule::schwarz();
  const std::vector<double> series{5.0, 5.0 + penalty(2, kE) - penalty(1, kE)};
  const auto out = ntgof::select_dimension(series, penalty, kE);
  ASSERT_EQ(out.penalized[0], out.penalized[1]);
  EXPECT_EQ(out.selected, 1u);
}

TEST(Select, HandComputedN100) {
  const std::vector<double> series{3.0, 12.0, 12.5};
  const auto out = ntgof::select_dimension(series, PenaltySchedule::schwarz(), 100);
  EXPECT_EQ(out.selected, 2u);
  EXPECT_DOUBLE_EQ(out.statistic, 12.0);
  EXPECT_NEAR(out.penalized[0], -1.605, 1e-3);
  EXPECT_NEAR(out.penalized[1], 2.790, 1e-3);
  EXPECT_NEAR(out.penalized[2], -1.316, 1e-3);
}

TEST(Select, NonFiniteFails) {
  const std::vector<double> series{1.0, INFINITY};
  EXPECT_THROW(ntgof::select_dimension(series, PenaltySchedule::schwarz(), 10), ntgof::NumericError);
}

TEST(Select, ArgmaxInvariance) {
  ntgof::Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  const auto base = PenaltySchedule::schwarz();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> series(6);
    double acc = 0.0;
    for (auto& t : series) t = (acc += u(rng) / 3.0);
    const double n = 50 + trial;
    const double c = u(rng) - 15.0;
    const auto shifted_penalty =
        PenaltySchedule::user("shifted", [&](std::size_t k, double m) { return base(k, m) + c; });
    std::vector<double> shifted_series(series);
    for (auto& t : shifted_series) t += c;
    const auto ref = ntgof::select_dimension(series, base, n);
    EXPECT_EQ(ntgof::select_dimension(series, shifted_penalty, n).selected, ref.selected);
    EXPECT_EQ(ntgof::select_dimension(shifted_series, base, n).selected, ref.selected);
  }
}

TEST(Budget, AutomaticRule) {
  const auto d = DimensionBudget::automatic();
  EXPECT_EQ(d(1), 2u);
  EXPECT_EQ(d(80), 2u);
  EXPECT_EQ(d(81), 3u);
  EXPECT_EQ(d(625), 5u);
  EXPECT_EQ(d(624), 4u);
  EXPECT_EQ(d(100000000), 12u);
  std::size_t previous = 0;
  for (std::size_t n = 1; n < 30000; n += 7) {
    EXPECT_GE(d(n), previous);
    previous = d(n);
  }
  EXPECT_EQ(ntgof::integer_fourth_root(10000), 10u);
  EXPECT_EQ(ntgof::integer_fourth_root(9999), 9u);
}

TEST(Penalty, Linear2kAndTable) {
  const auto lin = PenaltySchedule::linear_2k();
  EXPECT_EQ(lin.label(), "linear2k");
  EXPECT_DOUBLE_EQ(lin(3, 1e6), 6.0);
  EXPECT_DOUBLE_EQ(lin.delta(3, 1e6), 4.0);
  const auto table = PenaltySchedule::table({{{1, 10}, 0.5}, {{2, 10}, 1.5}});
  EXPECT_EQ(table.kind(), ntgof::PenaltyKind::user_table);
  EXPECT_DOUBLE_EQ(table(2, 10), 1.5);
  EXPECT_THROW(table(3, 10), ntgof::InvalidArgument);
}

const ntgof::EigenvalueProvider kUnitEigen = [](std::size_t, double) { return 1.0; };

TEST(ValidatePenalty, SchwarzPasses) {
  const std::vector<double> grid{1e2, 1e4, 1e6};
  const auto report = ntgof::validate_penalty(PenaltySchedule::schwarz(),
                                              DimensionBudget::fourth_root(12), kUnitEigen, grid);
  EXPECT_TRUE(report.passed());
  for (const auto& check : report.checks) EXPECT_TRUE(check.passed) << check.name << check.detail;
}

TEST(ValidatePenalty, ConstantIncrementsDoNotDiverge) {
  const std::vector<double> grid{1e2, 1e4, 1e6};
  const auto flat = PenaltySchedule::user("flat", [](std::size_t k, double) { return double(k); });
  const auto report =
      ntgof::validate_penalty(flat, DimensionBudget::fourth_root(12), kUnitEigen, grid);
  EXPECT_FALSE(report.find("divergent_increments")->passed);
  EXPECT_TRUE(report.find("monotone_in_k")->passed);
}

TEST(ValidatePenalty, DecreasingInKFails) {
  const std::vector<double> grid{1e2, 1e4, 1e6};
  const auto decreasing =
      PenaltySchedule::user("dec", [](std::size_t k, double n) { return std::log(n) / k; });
  const auto report =
      ntgof::validate_penalty(decreasing, DimensionBudget::fourth_root(12), kUnitEigen, grid);
  EXPECT_FALSE(report.find("monotone_in_k")->passed);
  EXPECT_FALSE(report.passed());
}

TEST(ValidatePenalty, SmallSampleWarnsOnly) {
  const std::vector<double> grid{20, 40, 80};
  const auto report = ntgof::validate_penalty(PenaltySchedule::schwarz(),
                                              DimensionBudget::fixed(3), kUnitEigen, grid);
  EXPECT_TRUE(report.passed());
  EXPECT_FALSE(report.warnings.empty());
}

std::vector<std::pair<std::size_t, double>> proper_grid() {
  std::vector<std::pair<std::size_t, double>> grid;
  const auto d = DimensionBudget::automatic();
  for (double n : {1e3, 1e4, 1e5}) {
    for (std::size_t k = 2; k <= std::min<std::size_t>(8, d(static_cast<std::size_t>(n))); ++k) {
      grid.emplace_back(k, n);
    }
  }
  return grid;
}

ntgof::ProperWeightSpec envelope_spec() {
  const auto d = DimensionBudget::automatic();
  ntgof::ProperWeightSpec spec;
  spec.lower = [](std::size_t k, double) { return std::sqrt(2.0 * k); };
  spec.upper = [](std::size_t k, double n) { return std::sqrt(n) / ntgof::sup_norm_bound(k); };
  spec.u = [d](double n) { return d(static_cast<std::size_t>(n)); };
  spec.m = spec.u;
  spec.scale = ntgof::EnvelopeScale::root_penalty;
  return spec;
}

TEST(ProperWeight, EnvelopeChoicesPass) {
  const auto grid = proper_grid();
  const auto report =
      ntgof::check_proper_weight(envelope_spec(), PenaltySchedule::schwarz(), grid, kUnitEigen);
  for (const auto& check : report.checks) EXPECT_TRUE(check.passed) << check.name << check.detail;
}

TEST(ProperWeight, SandwichFailures) {
  const auto grid = proper_grid();
  const auto penalty = PenaltySchedule::schwarz();
  auto doubled = envelope_spec();
  doubled.scale = ntgof::EnvelopeScale::penalty;
  doubled.lower = [penalty](std::size_t k, double n) { return 2.0 * penalty.delta(k, n); };
  doubled.upper = [](std::size_t, double) { return INFINITY; };
  EXPECT_FALSE(ntgof::check_proper_weight(doubled, penalty, grid, kUnitEigen).find("sandwich")->passed);

  auto zero_upper = envelope_spec();
  zero_upper.upper = [](std::size_t, double) { return 0.0; };
  EXPECT_FALSE(
      ntgof::check_proper_weight(zero_upper, penalty, grid, kUnitEigen).find("sandwich")->passed);
}

TEST(ProperWeight, Linear2kFlaggedForTwoKRequirement) {
  const auto grid = proper_grid();
  auto spec = envelope_spec();
  spec.scale = ntgof::EnvelopeScale::penalty;
  spec.lower = [](std::size_t k, double) { return 2.0 * k; };
  spec.upper = [](std::size_t, double n) { return n; };
  const auto report = ntgof::check_proper_weight(spec, PenaltySchedule::linear_2k(), grid, kUnitEigen);
  EXPECT_FALSE(report.find("sandwich")->passed);
}

}  // namespace
