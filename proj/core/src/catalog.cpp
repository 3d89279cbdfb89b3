#include "ntgof/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ntgof/error.hpp"

namespace ntgof {

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::uniformity:
      return "uniformity";
    case TestKind::independence_rank:
      return "independence";
    case TestKind::deconvolution_simple:
      return "deconvolution";
    case TestKind::composite_parametric:
      return "composite";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Test specifications

namespace {

void check_cap(const TestSpec& spec) {
  if (spec.budget.cap() > spec.basis.max_degree()) {
    throw InvalidArgument("test spec: budget cap " + std::to_string(spec.budget.cap()) +
                          " exceeds basis max_degree " + std::to_string(spec.basis.max_degree()));
  }
}

TestSpec make_spec(TestKind kind, PenaltySchedule penalty, DimensionBudget budget) {
  TestSpec spec;
  spec.kind = kind;
  spec.basis = OrthonormalBasis::legendre(std::max<std::size_t>(12, budget.cap()));
  spec.penalty = std::move(penalty);
  spec.budget = std::move(budget);
  check_cap(spec);
  return spec;
}

}  // namespace

TestSpec TestSpec::uniformity(PenaltySchedule penalty, DimensionBudget budget) {
  return make_spec(TestKind::uniformity, std::move(penalty), std::move(budget));
}

TestSpec TestSpec::independence(PenaltySchedule penalty, DimensionBudget budget) {
  return make_spec(TestKind::independence_rank, std::move(penalty), std::move(budget));
}

TestSpec TestSpec::deconvolution_simple(DeconvolutionModel model, PenaltySchedule penalty,
                                        DimensionBudget budget, std::size_t moment_draws,
                                        std::uint64_t moment_seed) {
  TestSpec spec = make_spec(TestKind::deconvolution_simple, std::move(penalty), std::move(budget));
  const std::size_t k = spec.budget.cap();
  const OrthonormalBasis basis = spec.basis;
  NullSampler<double> sampler = [model](Rng& rng) {
    const double x = model.signal.sample(rng);
    return x + model.noise.sample(rng);
  };
  ScoreBasis<double> scores{k, [basis, model](const double& y, std::span<double> out) {
                              deconvolution_scores(y, basis, model, out);
                            }};
  const auto estimate = estimate_second_moment(sampler, scores, std::max(moment_draws, 10 * k * k),
                                               moment_seed);
  spec.deconvolution = std::move(model);
  spec.deconvolution_moment = std::make_shared<const Eigen::MatrixXd>(estimate.second_moment);
  return spec;
}

TestSpec TestSpec::composite(ParametricFamily family, PenaltySchedule penalty,
                             DimensionBudget budget) {
  TestSpec spec = make_spec(TestKind::composite_parametric, std::move(penalty), std::move(budget));
  if (family.reference.size() != family.parameters) {
    throw InvalidArgument("composite spec: reference parameter has wrong length");
  }
  spec.family = std::move(family);
  return spec;
}

std::size_t TestSpec::dimension(std::size_t n) const {
  return std::min(budget(n), basis.max_degree());
}

// ---------------------------------------------------------------------------
// Uniformity

ScoreMatrix uniformity_scores(std::span<const double> data, const OrthonormalBasis& basis,
                              std::size_t k) {
  ScoreMatrix scores(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(k));
  std::vector<double> row(k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    basis.evaluate_all(data[i], row);
    for (std::size_t j = 0; j < k; ++j) {
      scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return scores;
}

TestOutcome uniformity_test(std::span<const double> data, const TestSpec& spec) {
  if (data.size() < 2) {
    throw InvalidArgument("uniformity_test: need at least 2 observations");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i] >= 0.0 && data[i] <= 1.0)) {
      throw InvalidArgument("uniformity_test: observation " + std::to_string(i + 1) + " = " +
                            std::to_string(data[i]) + " outside [0, 1]");
    }
  }
  TestOutcome outcome;
  outcome.n = data.size();
  outcome.dimension = spec.dimension(outcome.n);
  const auto series = snt_statistic(uniformity_scores(data, spec.basis, outcome.dimension));
  outcome.selection = select_dimension(series, spec.penalty, static_cast<double>(outcome.n));
  return outcome;
}

// ---------------------------------------------------------------------------
// Rank independence

RankTransform rank_transform_all(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  RankTransform out;
  out.values.resize(n);
  const auto nd = static_cast<double>(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && values[order[stop]] == values[order[start]]) {
      ++stop;
    }
    if (stop - start > 1) {
      out.had_ties = true;
    }
    // Ranks start..stop-1 (0-based) share their average, 1-based.
    const double rank = 0.5 * (static_cast<double>(start + 1) + static_cast<double>(stop));
    for (std::size_t p = start; p < stop; ++p) {
      out.values[order[p]] = (rank - 0.5) / nd;
    }
    start = stop;
  }
  return out;
}

double rank_transform(std::span<const double> values, std::size_t i) {
  if (i == 0 || i > values.size()) {
    throw InvalidArgument("rank_transform: index out of range");
  }
  return rank_transform_all(values).values[i - 1];
}

ScoreMatrix independence_scores(std::span<const double> u, std::span<const double> v,
                                const OrthonormalBasis& basis, std::size_t k) {
  ScoreMatrix scores(static_cast<Eigen::Index>(u.size()), static_cast<Eigen::Index>(k));
  std::vector<double> bu(k);
  std::vector<double> bv(k);
  for (std::size_t i = 0; i < u.size(); ++i) {
    basis.evaluate_all(u[i], bu);
    basis.evaluate_all(v[i], bv);
    for (std::size_t j = 0; j < k; ++j) {
      scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = bu[j] * bv[j];
    }
  }
  return scores;
}

TestOutcome independence_rank_test(std::span<const double> x, std::span<const double> y,
                                   const TestSpec& spec) {
  if (x.size() != y.size()) {
    throw InvalidArgument("independence_rank_test: x and y differ in length");
  }
  if (x.size() < 2) {
    throw InvalidArgument("independence_rank_test: need at least 2 pairs");
  }
  const auto rx = rank_transform_all(x);
  const auto ry = rank_transform_all(y);
  TestOutcome outcome;
  outcome.n = x.size();
  outcome.dimension = spec.dimension(outcome.n);
  if (rx.had_ties || ry.had_ties) {
    outcome.warnings.emplace_back(
        "ties in the data were given average ranks; the test assumes continuous marginals");
  }
  const auto series =
      snt_statistic(independence_scores(rx.values, ry.values, spec.basis, outcome.dimension));
  outcome.selection = select_dimension(series, spec.penalty, static_cast<double>(outcome.n));
  return outcome;
}

// ---------------------------------------------------------------------------
// Deconvolution

NullDensity NullDensity::uniform01() {
  NullDensity density;
  density.name = "uniform";
  density.pdf = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
  density.cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  density.lower = 0.0;
  density.upper = 1.0;
  density.sample = [](Rng& rng) { return ntgof::uniform01(rng); };
  return density;
}

NoiseDensity NoiseDensity::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("gaussian noise: sigma must be positive");
  }
  NoiseDensity noise;
  noise.name = "gaussian";
  noise.scale = sigma;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  noise.pdf = [sigma, norm](double e) {
    const double z = e / sigma;
    return norm * std::exp(-0.5 * z * z);
  };
  noise.sample = [sigma](Rng& rng) { return sigma * standard_normal(rng); };
  return noise;
}

namespace {

std::pair<double, double> deconvolution_window(double y, const DeconvolutionModel& model) {
  const double reach = 8.0 * model.noise.scale;
  return {std::max(y - reach, model.signal.lower), std::min(y + reach, model.signal.upper)};
}

}  // namespace

double deconvolution_null_density(double y, const DeconvolutionModel& model) {
  const auto [a, b] = deconvolution_window(y, model);
  if (!(b > a)) {
    return 0.0;
  }
  return adaptive_simpson(
      [&](double s) { return model.signal.pdf(s) * model.noise.pdf(y - s); }, a, b,
      model.quadrature);
}

void deconvolution_scores(double y, const OrthonormalBasis& basis, const DeconvolutionModel& model,
                          std::span<double> out) {
  const std::size_t k = out.size();
  const auto [a, b] = deconvolution_window(y, model);
  std::vector<double> integrals(k + 1, 0.0);
  if (b > a) {
    // Component 0 is the null density of y; components 1..k the numerators.
    std::vector<double> basis_values(k);
    integrals = adaptive_simpson(
        [&](double s, std::span<double> values) {
          const double weight = model.signal.pdf(s) * model.noise.pdf(y - s);
          values[0] = weight;
          if (k > 0) {
            basis.evaluate_all(std::clamp(model.signal.cdf(s), 0.0, 1.0), basis_values);
            for (std::size_t j = 0; j < k; ++j) {
              values[j + 1] = basis_values[j] * weight;
            }
          }
        },
        k + 1, a, b, model.quadrature);
  }
  const double denominator = integrals[0];
  if (!(denominator > 1e-300)) {
    throw NumericError("deconvolution_score: null density of the observation vanishes at y=" +
                       std::to_string(y));
  }
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = integrals[j + 1] / denominator;
  }
}

double deconvolution_score(double y, std::size_t j, const OrthonormalBasis& basis,
                           const DeconvolutionModel& model) {
  if (j == 0 || j > basis.max_degree()) {
    throw InvalidArgument("deconvolution_score: component index out of range");
  }
  std::vector<double> values(j);
  deconvolution_scores(y, basis, model, values);
  return values[j - 1];
}

TestOutcome deconvolution_test(std::span<const double> data, const TestSpec& spec) {
  if (!spec.deconvolution || !spec.deconvolution_moment) {
    throw InvalidArgument("deconvolution_test: spec has no deconvolution model");
  }
  if (data.size() < 2) {
    throw InvalidArgument("deconvolution_test: need at least 2 observations");
  }
  TestOutcome outcome;
  outcome.n = data.size();
  outcome.dimension = std::min(spec.dimension(outcome.n),
                               static_cast<std::size_t>(spec.deconvolution_moment->rows()));
  const std::size_t k = outcome.dimension;
  ScoreMatrix scores(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(k));
  std::vector<double> row(k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw InvalidArgument("deconvolution_test: non-finite observation");
    }
    deconvolution_scores(data[i], spec.basis, *spec.deconvolution, row);
    for (std::size_t j = 0; j < k; ++j) {
      scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  const auto matrices = nested_normalizing_matrices(*spec.deconvolution_moment, k,
                                                    MatrixProvenance::estimated_from_null_sampler);
  const auto series = nt_series(scores, matrices);
  outcome.selection = select_dimension(series, spec.penalty, static_cast<double>(outcome.n));
  return outcome;
}

// ---------------------------------------------------------------------------
// Dispatch and null simulation

TestOutcome run_test(const TestSpec& spec, const Sample& sample) {
  switch (spec.kind) {
    case TestKind::uniformity:
      return uniformity_test(sample.x, spec);
    case TestKind::independence_rank:
      return independence_rank_test(sample.x, sample.y, spec);
    case TestKind::deconvolution_simple:
      return deconvolution_test(sample.x, spec);
    case TestKind::composite_parametric:
      return composite_test(sample.x, spec);
  }
  throw InvalidArgument("run_test: unknown test kind");
}

Sample sample_null(const TestSpec& spec, std::size_t n, Rng& rng) {
  Sample sample;
  sample.x.resize(n);
  switch (spec.kind) {
    case TestKind::uniformity:
      for (auto& v : sample.x) {
        v = uniform01(rng);
      }
      break;
    case TestKind::independence_rank:
      sample.y.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        sample.x[i] = uniform01(rng);
        sample.y[i] = uniform01(rng);
      }
      break;
    case TestKind::deconvolution_simple: {
      if (!spec.deconvolution) {
        throw InvalidArgument("sample_null: spec has no deconvolution model");
      }
      const auto& model = *spec.deconvolution;
      for (auto& v : sample.x) {
        const double signal = model.signal.sample(rng);
        v = signal + model.noise.sample(rng);
      }
      break;
    }
    case TestKind::composite_parametric: {
      if (!spec.family) {
        throw InvalidArgument("sample_null: spec has no parametric family");
      }
      for (auto& v : sample.x) {
        v = spec.family->sample(rng, spec.family->reference);
      }
      break;
    }
  }
  return sample;
}

// ---------------------------------------------------------------------------
// Alternatives

AlternativeSpec AlternativeSpec::contamination(std::size_t j, double amplitude,
                                               std::optional<NoiseDensity> noise) {
  if (j == 0) {
    throw InvalidArgument("contamination: component index must be positive");
  }
  if (amplitude == 0.0 || !std::isfinite(amplitude)) {
    throw InvalidArgument("contamination: amplitude must be finite and non-zero");
  }
  const double peak = std::sqrt(2.0 * static_cast<double>(j) + 1.0);  // sup |b_j|
  if (std::abs(amplitude) * peak > 1.0) {
    throw InvalidArgument("contamination: density 1 + a b_" + std::to_string(j) +
                          " is negative somewhere for a=" + std::to_string(amplitude));
  }
  const auto basis = OrthonormalBasis::legendre(j);
  const double ceiling = 1.0 + std::abs(amplitude) * peak;
  AlternativeSpec alt;
  alt.label = "contamination(j=" + std::to_string(j) + ", a=" + std::to_string(amplitude) + ")";
  alt.first_component = j;
  alt.component_mean = amplitude;
  alt.sampler = [basis, j, amplitude, ceiling, noise](std::size_t n, Rng& rng) {
    Sample sample;
    sample.x.resize(n);
    for (auto& v : sample.x) {
      for (;;) {
        const double x = uniform01(rng);
        const double accept = uniform01(rng) * ceiling;
        if (accept <= 1.0 + amplitude * basis(j, x)) {
          v = x;
          break;
        }
      }
      if (noise) {
        v += noise->sample(rng);
      }
    }
    return sample;
  };
  return alt;
}

AlternativeSpec AlternativeSpec::null_of(const TestSpec& spec, std::size_t declared_k) {
  AlternativeSpec alt;
  alt.label = "null(" + to_string(spec.kind) + ")";
  alt.first_component = declared_k;
  alt.sampler = [spec](std::size_t n, Rng& rng) { return sample_null(spec, n, rng); };
  return alt;
}

AlternativeSpec AlternativeSpec::linear_dependence(double noise_sd) {
  if (!(noise_sd >= 0.0)) {
    throw InvalidArgument("linear_dependence: noise_sd must be non-negative");
  }
  AlternativeSpec alt;
  alt.label = "linear_dependence(sd=" + std::to_string(noise_sd) + ")";
  alt.first_component = 1;
  alt.sampler = [noise_sd](std::size_t n, Rng& rng) {
    Sample sample;
    sample.x.resize(n);
    sample.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      sample.x[i] = standard_normal(rng);
      sample.y[i] = sample.x[i] + noise_sd * standard_normal(rng);
    }
    return sample;
  };
  return alt;
}

AlternativeSpec AlternativeSpec::custom(std::string label, std::size_t k, std::optional<double> c_p,
                                        std::function<Sample(std::size_t, Rng&)> sampler) {
  if (k == 0) {
    throw InvalidArgument("alternative: K must be positive");
  }
  if (c_p && *c_p == 0.0) {
    throw InvalidArgument("alternative: declared C_P must be non-zero");
  }
  if (!sampler) {
    throw InvalidArgument("alternative: empty sampler");
  }
  AlternativeSpec alt;
  alt.label = std::move(label);
  alt.first_component = k;
  alt.component_mean = c_p;
  alt.sampler = std::move(sampler);
  return alt;
}

}  // namespace ntgof
