#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ntgof/basis.hpp"
#include "ntgof/quadrature.hpp"
#include "ntgof/random.hpp"
#include "ntgof/selection.hpp"
#include "ntgof/statistics.hpp"

namespace ntgof {

/// A dataset. Univariate tests use `x`; the rank independence test uses the
/// pairs (x[i], y[i]).
struct Sample {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return x.size(); }
};

enum class TestKind { uniformity, independence_rank, deconvolution_simple, composite_parametric };

std::string to_string(TestKind kind);

/// Known density of the signal X under a simple null, with support [lower, upper].
struct NullDensity {
  std::string name;
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  double lower = 0.0;
  double upper = 1.0;
  std::function<double(Rng&)> sample;

  static NullDensity uniform01();
};

/// Known density of additive measurement noise.
struct NoiseDensity {
  std::string name;
  std::function<double(double)> pdf;
  double scale = 1.0;  // standard deviation; integration window is +-8 scale
  std::function<double(Rng&)> sample;

  static NoiseDensity gaussian(double sigma);
};

struct DeconvolutionModel {
  NullDensity signal;
  NoiseDensity noise;
  SimpsonOptions quadrature{};
};

/// Score of the j-th component for observing y = x + noise, built from the
/// perturbation family f_theta = f0 (1 + sum theta_j b_j(F0)):
///
///   l_j(y) = int b_j(F0(s)) f0(s) h(y - s) ds / int f0(s) h(y - s) ds,
///
/// both integrals taken by adaptive Simpson over [y - 8 sigma, y + 8 sigma]
/// intersected with the signal support. Throws NumericError when the
/// denominator is at most 1e-300 or the quadrature does not converge.
double deconvolution_score(double y, std::size_t j, const OrthonormalBasis& basis,
                           const DeconvolutionModel& model);

/// l_1(y) .. l_{out.size()}(y). Numerators and denominator are integrated
/// together by one vector-valued adaptive Simpson pass.
void deconvolution_scores(double y, const OrthonormalBasis& basis, const DeconvolutionModel& model,
                          std::span<double> out);

/// Density g0 of the observable y under the null: int f0(s) h(y - s) ds.
double deconvolution_null_density(double y, const DeconvolutionModel& model);

/// Parametric family f(x; beta), beta in R^q, used by the composite test.
struct ParametricFamily {
  std::string name;
  std::size_t parameters = 0;
  std::function<double(double x, std::span<const double> beta)> cdf;
  std::function<double(double u, std::span<const double> beta)> quantile;
  std::function<double(double x, std::span<const double> beta)> log_density;
  /// Maximum likelihood estimate under the family. Throws NumericError when
  /// no estimate exists for the data.
  std::function<std::vector<double>(std::span<const double> data)> fit;
  std::function<double(Rng&, std::span<const double> beta)> sample;
  /// Parameter used to simulate null data.
  std::vector<double> reference;

  /// N(mu, 1), mu unknown.
  static ParametricFamily normal_location();
  /// N(mu, sigma^2), both unknown.
  static ParametricFamily normal();
  /// Exponential with unknown rate.
  static ParametricFamily exponential();
  /// N(0, 1) with nothing estimated (q = 0).
  static ParametricFamily standard_normal();
};

/// How R(beta) is formed from the information blocks.
enum class NuisanceCorrection {
  inverse,  // R = I_b^T (I_bb - I_b I_b^T)^{-1} I_b  (efficient-score form, default)
  literal,  // R = I_b^T (I_bb - I_b I_b^T) I_b
};

struct CompositeComponents {
  Eigen::VectorXd mean_scores;  // Y_n(beta_hat), k entries
  Eigen::MatrixXd i_beta;       // q x k
  Eigen::MatrixXd i_beta_beta;  // q x q
  ScoreMatrix scores;           // phi_j(F(X_i; beta_hat)), n x k
};

/// Y_n(beta), I_beta and I_beta_beta at `beta`. Expectations use a 400-node
/// Gauss-Legendre rule in u = F(x; beta), falling back to 10^5 Monte Carlo
/// draws if the rule produces non-finite values; derivatives in beta are
/// central differences.
CompositeComponents composite_components(std::span<const double> data,
                                         const ParametricFamily& family, std::size_t k,
                                         std::span<const double> beta);

/// I + R(beta) for the first k score components. Throws NumericError when
/// I_bb - I_b I_b^T is singular (inverse form).
Eigen::MatrixXd composite_normalizing_matrix(const Eigen::MatrixXd& i_beta,
                                             const Eigen::MatrixXd& i_beta_beta,
                                             NuisanceCorrection form = NuisanceCorrection::inverse);

/// W_k(beta_hat) = n Y_n^T {I + R(beta_hat)} Y_n.
double composite_score_statistic(std::span<const double> data, const ParametricFamily& family,
                                 std::size_t k, std::span<const double> beta_hat,
                                 NuisanceCorrection form = NuisanceCorrection::inverse);

/// A ready-to-run test: score construction, penalty and dimension budget.
struct TestSpec {
  TestKind kind = TestKind::uniformity;
  OrthonormalBasis basis = OrthonormalBasis::legendre(12);
  PenaltySchedule penalty = PenaltySchedule::schwarz();
  DimensionBudget budget = DimensionBudget::automatic(12);

  std::optional<DeconvolutionModel> deconvolution;
  /// E_0[l l^T] of the deconvolution scores, budget.cap() square.
  std::shared_ptr<const Eigen::MatrixXd> deconvolution_moment;

  std::optional<ParametricFamily> family;
  NuisanceCorrection correction = NuisanceCorrection::inverse;

  static TestSpec uniformity(PenaltySchedule penalty = PenaltySchedule::schwarz(),
                             DimensionBudget budget = DimensionBudget::automatic(12));
  static TestSpec independence(PenaltySchedule penalty = PenaltySchedule::schwarz(),
                               DimensionBudget budget = DimensionBudget::automatic(12));
  /// Estimates E_0[l l^T] from `moment_draws` null draws (at least 10 cap^2).
  static TestSpec deconvolution_simple(DeconvolutionModel model,
                                       PenaltySchedule penalty = PenaltySchedule::schwarz(),
                                       DimensionBudget budget = DimensionBudget::automatic(12),
                                       std::size_t moment_draws = 20000,
                                       std::uint64_t moment_seed = 1);
  static TestSpec composite(ParametricFamily family,
                            PenaltySchedule penalty = PenaltySchedule::schwarz(),
                            DimensionBudget budget = DimensionBudget::automatic(12));

  /// Effective d(n) for this spec.
  std::size_t dimension(std::size_t n) const;
};

struct TestOutcome {
  SelectionOutcome selection;
  std::size_t n = 0;
  std::size_t dimension = 0;  // d(n)
  std::vector<std::string> warnings;

  double statistic() const noexcept { return selection.statistic; }
};

/// Legendre scores b_j(x_i), n x k.
ScoreMatrix uniformity_scores(std::span<const double> data, const OrthonormalBasis& basis,
                              std::size_t k);

/// Data-driven smooth test of uniformity on [0, 1]. Throws InvalidArgument
/// for n < 2 or a datum outside [0, 1].
TestOutcome uniformity_test(std::span<const double> data, const TestSpec& spec);

struct RankTransform {
  std::vector<double> values;  // (R_i - 1/2) / n
  bool had_ties = false;
};

/// (R_i - 1/2)/n for every i, with average ranks for ties.
RankTransform rank_transform_all(std::span<const double> values);

/// (R_i - 1/2)/n for the 1-based index i.
double rank_transform(std::span<const double> values, std::size_t i);

/// Scores b_j(u_i) b_j(v_i) for rank-transformed pairs, n x k.
ScoreMatrix independence_scores(std::span<const double> u, std::span<const double> v,
                                const OrthonormalBasis& basis, std::size_t k);

/// Rank test of independence with identity normalizing matrix. Ties get
/// average ranks and a warning in the outcome.
TestOutcome independence_rank_test(std::span<const double> x, std::span<const double> y,
                                   const TestSpec& spec);

TestOutcome deconvolution_test(std::span<const double> data, const TestSpec& spec);

/// Refits beta by the family MLE, then selects among W_1 .. W_d.
TestOutcome composite_test(std::span<const double> data, const TestSpec& spec);

/// Dispatches on spec.kind.
TestOutcome run_test(const TestSpec& spec, const Sample& sample);

/// Draws a dataset of size n from the null hypothesis of `spec`.
Sample sample_null(const TestSpec& spec, std::size_t n, Rng& rng);

/// An alternative distribution with its declared first non-vanishing
/// component K and mean C_P of l_K under it.
struct AlternativeSpec {
  std::string label;
  std::size_t first_component = 1;  // K
  std::optional<double> component_mean;  // C_P, non-zero when declared
  std::function<Sample(std::size_t n, Rng& rng)> sampler;
  /// Optional witness of the large-deviation rate r_n.
  std::function<double(double n)> rate;

  /// Signal density 1 + amplitude b_j(x) on [0, 1]; K = j, C_P = amplitude.
  /// With `noise`, observations are signal + noise. Throws InvalidArgument
  /// when the density would be negative somewhere.
  static AlternativeSpec contamination(std::size_t j, double amplitude,
                                       std::optional<NoiseDensity> noise = std::nullopt);
  /// The null of `spec`, relabelled as an alternative with declared K.
  static AlternativeSpec null_of(const TestSpec& spec, std::size_t declared_k);
  /// x ~ N(0, 1), y = x + N(0, noise_sd^2).
  static AlternativeSpec linear_dependence(double noise_sd);
  static AlternativeSpec custom(std::string label, std::size_t k, std::optional<double> c_p,
                                std::function<Sample(std::size_t, Rng&)> sampler);
};

}  // namespace ntgof
