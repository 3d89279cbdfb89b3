#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ntgof/catalog.hpp"
#include "ntgof/error.hpp"

namespace ntgof {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double u) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

double sample_mean(std::span<const double> data) {
  if (data.empty()) {
    throw InvalidArgument("family fit: empty sample");
  }
  return std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
}

constexpr std::size_t kQuadratureNodes = 400;
constexpr std::size_t kMonteCarloDraws = 100000;
constexpr std::uint64_t kInformationStream = 0x494e464fULL;

// Central-difference step for parameter t.
double step_for(double value, double relative) {
  return relative * std::max(1.0, std::abs(value));
}

}  // namespace

ParametricFamily ParametricFamily::normal_location() {
  ParametricFamily family;
  family.name = "normal_location";
  family.parameters = 1;
  family.cdf = [](double x, std::span<const double> b) { return normal_cdf(x - b[0]); };
  family.quantile = [](double u, std::span<const double> b) { return b[0] + normal_quantile(u); };
  family.log_density = [](double x, std::span<const double> b) {
    const double z = x - b[0];
    return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
  };
  family.fit = [](std::span<const double> data) { return std::vector<double>{sample_mean(data)}; };
  family.sample = [](Rng& rng, std::span<const double> b) { return b[0] + ntgof::standard_normal(rng); };
  family.reference = {0.0};
  return family;
}

ParametricFamily ParametricFamily::normal() {
  ParametricFamily family;
  family.name = "normal";
  family.parameters = 2;
  family.cdf = [](double x, std::span<const double> b) { return normal_cdf((x - b[0]) / b[1]); };
  family.quantile = [](double u, std::span<const double> b) {
    return b[0] + b[1] * normal_quantile(u);
  };
  family.log_density = [](double x, std::span<const double> b) {
    const double z = (x - b[0]) / b[1];
    return -0.5 * z * z - std::log(b[1]) - 0.5 * std::log(2.0 * std::numbers::pi);
  };
  family.fit = [](std::span<const double> data) {
    const double mean = sample_mean(data);
    double ss = 0.0;
    for (const double v : data) {
      ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(data.size()));
    if (!(sd > 0.0)) {
      throw NumericError("normal fit: zero sample variance, no maximum likelihood estimate");
    }
    return std::vector<double>{mean, sd};
  };
  family.sample = [](Rng& rng, std::span<const double> b) {
    return b[0] + b[1] * ntgof::standard_normal(rng);
  };
  family.reference = {0.0, 1.0};
  return family;
}

ParametricFamily ParametricFamily::exponential() {
  ParametricFamily family;
  family.name = "exponential";
  family.parameters = 1;
  family.cdf = [](double x, std::span<const double> b) {
    return x <= 0.0 ? 0.0 : -std::expm1(-b[0] * x);
  };
  family.quantile = [](double u, std::span<const double> b) { return -std::log1p(-u) / b[0]; };
  family.log_density = [](double x, std::span<const double> b) {
    return std::log(b[0]) - b[0] * x;
  };
  family.fit = [](std::span<const double> data) {
    for (const double v : data) {
      if (v < 0.0) {
        throw InvalidArgument("exponential fit: negative observation");
      }
    }
    const double mean = sample_mean(data);
    if (!(mean > 0.0)) {
      throw NumericError("exponential fit: zero sample mean, no maximum likelihood estimate");
    }
    return std::vector<double>{1.0 / mean};
  };
  family.sample = [](Rng& rng, std::span<const double> b) {
    return -std::log1p(-uniform01(rng)) / b[0];
  };
  family.reference = {1.0};
  return family;
}

ParametricFamily ParametricFamily::standard_normal() {
  ParametricFamily family;
  family.name = "standard_normal";
  family.parameters = 0;
  family.cdf = [](double x, std::span<const double>) { return normal_cdf(x); };
  family.quantile = [](double u, std::span<const double>) { return normal_quantile(u); };
  family.log_density = [](double x, std::span<const double>) {
    return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
  };
  family.fit = [](std::span<const double>) { return std::vector<double>{}; };
  family.sample = [](Rng& rng, std::span<const double>) { return ntgof::standard_normal(rng); };
  return family;
}

namespace {

struct InformationBlocks {
  Eigen::MatrixXd i_beta;
  Eigen::MatrixXd i_beta_beta;
};

// Accumulates -d/dbeta phi_j(F(x; beta)) and -d2/dbeta2 log f(x; beta) at x
// with weight w.
void accumulate_information(const ParametricFamily& family, const OrthonormalBasis& basis,
                            std::size_t k, std::span<const double> beta, double x, double w,
                            InformationBlocks& blocks) {
  const std::size_t q = family.parameters;
  std::vector<double> shifted(beta.begin(), beta.end());
  std::vector<double> plus(k);
  std::vector<double> minus(k);
  auto scores_at = [&](std::span<double> out) {
    const double u = std::clamp(family.cdf(x, shifted), 0.0, 1.0);
    basis.evaluate_all(u, out);
  };
  for (std::size_t t = 0; t < q; ++t) {
    const double h = step_for(beta[t], 1e-5);
    shifted[t] = beta[t] + h;
    scores_at(plus);
    shifted[t] = beta[t] - h;
    scores_at(minus);
    shifted[t] = beta[t];
    for (std::size_t j = 0; j < k; ++j) {
      blocks.i_beta(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) -=
          w * (plus[j] - minus[j]) / (2.0 * h);
    }
  }
  const double centre = family.log_density(x, beta);
  for (std::size_t t = 0; t < q; ++t) {
    const double ht = step_for(beta[t], 1e-4);
    for (std::size_t s = t; s < q; ++s) {
      double second = 0.0;
      if (s == t) {
        shifted[t] = beta[t] + ht;
        const double up = family.log_density(x, shifted);
        shifted[t] = beta[t] - ht;
        const double down = family.log_density(x, shifted);
        shifted[t] = beta[t];
        second = (up - 2.0 * centre + down) / (ht * ht);
      } else {
        const double hs = step_for(beta[s], 1e-4);
        auto at = [&](double dt, double ds) {
          shifted[t] = beta[t] + dt;
          shifted[s] = beta[s] + ds;
          const double v = family.log_density(x, shifted);
          shifted[t] = beta[t];
          shifted[s] = beta[s];
          return v;
        };
        second = (at(ht, hs) - at(ht, -hs) - at(-ht, hs) + at(-ht, -hs)) / (4.0 * ht * hs);
      }
      const auto ti = static_cast<Eigen::Index>(t);
      const auto si = static_cast<Eigen::Index>(s);
      blocks.i_beta_beta(ti, si) -= w * second;
      if (s != t) {
        blocks.i_beta_beta(si, ti) -= w * second;
      }
    }
  }
}

InformationBlocks information_blocks(const ParametricFamily& family, const OrthonormalBasis& basis,
                                     std::size_t k, std::span<const double> beta) {
  const auto q = static_cast<Eigen::Index>(family.parameters);
  const auto kk = static_cast<Eigen::Index>(k);
  InformationBlocks blocks{Eigen::MatrixXd::Zero(q, kk), Eigen::MatrixXd::Zero(q, q)};
  if (q == 0) {
    return blocks;
  }
  const auto rule = gauss_legendre(kQuadratureNodes);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = family.quantile(rule.nodes[i], beta);
    accumulate_information(family, basis, k, beta, x, rule.weights[i], blocks);
  }
  if (blocks.i_beta.allFinite() && blocks.i_beta_beta.allFinite()) {
    return blocks;
  }
  // Expectation by simulation when the rule hits a singular integrand.
  blocks = {Eigen::MatrixXd::Zero(q, kk), Eigen::MatrixXd::Zero(q, q)};
  const double w = 1.0 / static_cast<double>(kMonteCarloDraws);
  for (std::size_t i = 0; i < kMonteCarloDraws; ++i) {
    Rng rng = substream(0, kInformationStream, i);
    accumulate_information(family, basis, k, beta, family.sample(rng, beta), w, blocks);
  }
  if (!blocks.i_beta.allFinite() || !blocks.i_beta_beta.allFinite()) {
    throw NumericError("composite: Fisher information is not finite at the fitted parameter");
  }
  return blocks;
}

}  // namespace

CompositeComponents composite_components(std::span<const double> data,
                                         const ParametricFamily& family, std::size_t k,
                                         std::span<const double> beta) {
  if (data.empty()) {
    throw InvalidArgument("composite: empty sample");
  }
  if (k == 0) {
    throw InvalidArgument("composite: k must be positive");
  }
  if (beta.size() != family.parameters) {
    throw InvalidArgument("composite: parameter vector has wrong length");
  }
  const auto basis = OrthonormalBasis::legendre(k);
  CompositeComponents out;
  out.scores.resize(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(k));
  std::vector<double> row(k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw InvalidArgument("composite: non-finite observation");
    }
    const double u = std::clamp(family.cdf(data[i], beta), 0.0, 1.0);
    basis.evaluate_all(u, row);
    for (std::size_t j = 0; j < k; ++j) {
      out.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  out.mean_scores = out.scores.colwise().mean().transpose();
  auto blocks = information_blocks(family, basis, k, beta);
  out.i_beta = std::move(blocks.i_beta);
  out.i_beta_beta = std::move(blocks.i_beta_beta);
  return out;
}

Eigen::MatrixXd composite_normalizing_matrix(const Eigen::MatrixXd& i_beta,
                                             const Eigen::MatrixXd& i_beta_beta,
                                             NuisanceCorrection form) {
  const Eigen::Index k = i_beta.cols();
  const Eigen::Index q = i_beta.rows();
  if (i_beta_beta.rows() != q || i_beta_beta.cols() != q) {
    throw InvalidArgument("composite: information blocks have inconsistent sizes");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(k, k);
  if (q == 0) {
    return out;
  }
  Eigen::MatrixXd middle = i_beta_beta - i_beta * i_beta.transpose();
  middle = 0.5 * (middle + middle.transpose()).eval();
  if (form == NuisanceCorrection::inverse) {
    middle = invert_spd(middle);
  }
  Eigen::MatrixXd r = i_beta.transpose() * middle * i_beta;
  out += 0.5 * (r + r.transpose());
  return out;
}

double composite_score_statistic(std::span<const double> data, const ParametricFamily& family,
                                 std::size_t k, std::span<const double> beta_hat,
                                 NuisanceCorrection form) {
  const auto parts = composite_components(data, family, k, beta_hat);
  const auto normalizing = NormalizingMatrix::from_matrix(
      composite_normalizing_matrix(parts.i_beta, parts.i_beta_beta, form));
  return gnt_statistic(parts.scores, normalizing);
}

TestOutcome composite_test(std::span<const double> data, const TestSpec& spec) {
  if (!spec.family) {
    throw InvalidArgument("composite_test: spec has no parametric family");
  }
  if (data.size() < 2) {
    throw InvalidArgument("composite_test: need at least 2 observations");
  }
  const auto& family = *spec.family;
  const std::vector<double> beta_hat = family.fit(data);
  TestOutcome outcome;
  outcome.n = data.size();
  outcome.dimension = spec.dimension(outcome.n);
  const std::size_t d = outcome.dimension;
  const auto parts = composite_components(data, family, d, beta_hat);
  std::vector<double> series;
  series.reserve(d);
  for (std::size_t m = 1; m <= d; ++m) {
    const auto mi = static_cast<Eigen::Index>(m);
    const auto normalizing = NormalizingMatrix::from_matrix(composite_normalizing_matrix(
        parts.i_beta.leftCols(mi), parts.i_beta_beta, spec.correction));
    series.push_back(gnt_statistic(parts.scores.leftCols(mi), normalizing));
  }
  outcome.selection = select_dimension(series, spec.penalty, static_cast<double>(outcome.n));
  return outcome;
}

}  // namespace ntgof
