#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ntgof/basis.hpp"
#include "ntgof/error.hpp"
#include "ntgof/majorant.hpp"

namespace {

const double kPi = std::acos(-1.0);

// Straight evaluation with tgamma and pow, no logs.
double bound_oracle(std::size_t k, double y, double n, double m) {
  const double kd = static_cast<double>(k);
  return 150210.0 / std::tgamma(kd / 2.0) * std::pow(y * y / 2.0, (kd - 1.0) / 2.0) *
         std::exp(-(y * y / 2.0) * (1.0 - m * y / std::sqrt(n)));
}

TEST(Prohorov, KOneLargeNLimit) {
  const double value = ntgof::prohorov_bound(1, std::sqrt(2.0), 1e300, std::sqrt(3.0));
  EXPECT_NEAR(value, 150210.0 / std::sqrt(kPi) * std::exp(-1.0), 1e-8);
  EXPECT_NEAR(value, 31176.6, 0.05);
}

TEST(Prohorov, KTwoCalculatorValue) {
  const double m = std::sqrt(5.0);
  const double value = ntgof::prohorov_bound(2, 4.0, 1e6, m);
  const double expected = 150210.0 * std::sqrt(8.0) * std::exp(-8.0 * (1.0 - m * 4.0 / 1000.0));
  EXPECT_NEAR(value / expected, 1.0, 1e-13);
  EXPECT_NEAR(value, 150210.0 * 2.8284271 * std::exp(-7.9284), 0.5);
}

TEST(Prohorov, WindowErrors) {
  EXPECT_THROW(ntgof::prohorov_bound(2, 1.0, 1e6, std::sqrt(5.0)), ntgof::WindowError);
  EXPECT_THROW(ntgof::prohorov_bound(2, 100.0, 1000, std::sqrt(5.0)), ntgof::WindowError);
  EXPECT_NO_THROW(ntgof::prohorov_bound(3, std::sqrt(6.0), 1e4, std::sqrt(12.0)));
}

TEST(Prohorov, LogSpaceMatchesDirectEvaluation) {
  for (std::size_t k = 1; k <= 20; ++k) {
    const double m = ntgof::sup_norm_bound(k);
    for (double y : {std::sqrt(2.0 * k), std::sqrt(2.0 * k) + 1.0, std::sqrt(2.0 * k) + 5.0}) {
      const double got = ntgof::prohorov_bound(k, y, 1e6, m);
      EXPECT_NEAR(got / bound_oracle(k, y, 1e6, m), 1.0, 1e-12) << k << " " << y;
    }
  }
  // large k stays finite where tgamma alone would overflow
  EXPECT_TRUE(std::isfinite(ntgof::prohorov_bound(400, std::sqrt(800.0) + 30.0, 1e12, 1.0)));
}

TEST(Prohorov, DecreasingWhereLogDerivativeNegative) {
  for (std::size_t k = 1; k <= 3; ++k) {
    const double m = ntgof::sup_norm_bound(k);
    const auto [lo, hi] = ntgof::prohorov_window(k, 5000, m);
    double previous = INFINITY;
    bool in_decreasing_part = false;
    for (int i = 0; i <= 400; ++i) {
      const double y = lo + (hi - lo) * i / 400.0;
      const double h = 1e-6;
      const double slope = (std::log(bound_oracle(k, std::min(hi, y + h), 5000, m)) -
                            std::log(bound_oracle(k, std::max(lo, y - h), 5000, m)));
      const double value = ntgof::prohorov_bound(k, y, 5000, m);
      if (slope < 0 && in_decreasing_part) EXPECT_LT(value, previous) << "k=" << k << " y=" << y;
      in_decreasing_part = slope < 0;
      previous = value;
    }
  }
}

TEST(Ptype, DirectEvaluation) {
  ntgof::MajorantParams params;
  params.c1 = 1.0;
  params.c2 = 2.0;
  const std::vector<double> eig{1.0};
  EXPECT_NEAR(ntgof::ptype_majorant(params, 1, 3.0, eig, 100), std::exp(-4.5), 1e-15);
  EXPECT_NEAR(std::exp(-4.5), 0.011109, 1e-6);
}

TEST(Ptype, LinearInC1) {
  ntgof::MajorantParams params;
  params.c1 = 3.5;
  params.c2 = 1.7;
  params.phi1 = [](std::size_t k) { return 1.0 / k; };
  params.phi2 = [](std::span<const double> ev) { return ev[0]; };
  const std::vector<double> eig{2.0, 1.0, 0.5};
  const double once = ntgof::ptype_majorant(params, 3, 2.2, eig, 100);
  params.c1 *= 2.0;
  EXPECT_EQ(ntgof::ptype_majorant(params, 3, 2.2, eig, 100), 2.0 * once);
}

TEST(Ptype, ProhorovSpecialisationAgrees) {
  const double n = 1e6;
  for (std::size_t k = 1; k <= 6; ++k) {
    const double m = ntgof::sup_norm_bound(k);
    const double y0 = std::sqrt(2.0 * k);
    const auto params = ntgof::prohorov_as_ptype(y0, n, m);
    const std::vector<double> eig(k, 1.0);
    EXPECT_NEAR(ntgof::ptype_majorant(params, k, y0, eig, n) / ntgof::prohorov_bound(k, y0, n, m),
                1.0, 1e-12);
  }
}

TEST(Ptype, WindowExcludesZero) {
  const auto params = ntgof::prohorov_as_ptype(std::sqrt(6.0), 1e6, std::sqrt(12.0));
  const std::vector<double> eig(3, 1.0);
  EXPECT_THROW(ntgof::ptype_majorant(params, 3, 0.0, eig, 1e6), ntgof::WindowError);
}

TEST(B2Tail, SingleTermAndBound) {
  const double n = 1e6;
  const auto lower = [](std::size_t k, double) { return std::sqrt(2.0 * k); };
  const ntgof::Majorant majorant = [n](std::size_t k, double y) {
    return ntgof::prohorov_bound(k, y, n, ntgof::sup_norm_bound(k));
  };
  EXPECT_EQ(ntgof::b2_tail_sum(majorant, 5, 5, lower, n), majorant(5, lower(5, n)));

  const ntgof::Majorant decaying = [](std::size_t k, double y) { return std::exp(-y * k); };
  const auto fixed = [](std::size_t, double) { return 1.0; };
  EXPECT_LE(ntgof::b2_tail_sum(decaying, 2, 9, fixed, n), 8 * decaying(2, 1.0));
  EXPECT_THROW(ntgof::b2_tail_sum(decaying, 5, 4, fixed, n), ntgof::InvalidArgument);
}

TEST(B2Tail, ProhorovInstantiationSum) {
  const double n = 1e6;
  double oracle = 0.0;
  for (std::size_t k = 4; k <= 12; ++k) {
    const double m = std::sqrt((k - 1.0) * (k + 3.0));
    oracle += bound_oracle(k, std::sqrt(2.0 * k), n, m);
  }
  const ntgof::Majorant majorant = [n](std::size_t k, double y) {
    return ntgof::prohorov_bound(k, y, n, ntgof::sup_norm_bound(k));
  };
  const double sum = ntgof::b2_tail_sum(
      majorant, 4, 12, [](std::size_t k, double) { return std::sqrt(2.0 * k); }, n);
  EXPECT_TRUE(std::isfinite(sum));
  EXPECT_NEAR(sum / oracle, 1.0, 1e-12);
}

}  // namespace
