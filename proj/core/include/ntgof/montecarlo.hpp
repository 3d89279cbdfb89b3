#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ntgof/catalog.hpp"
#include "ntgof/random.hpp"

namespace ntgof {

struct MonteCarloConfig {
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  std::vector<std::size_t> n_grid;
  double alpha = 0.05;
  /// 0 = NTGOF_THREADS or hardware concurrency. Results never depend on it.
  std::size_t workers = 0;

  /// Throws InvalidArgument unless replications >= 100, alpha in (0, 1) and
  /// n_grid is strictly increasing.
  void validate() const;
};

struct CalibrationResult {
  std::vector<double> statistics;            // simulated T_S, sorted ascending
  std::vector<std::size_t> selected_counts;  // [S-1] -> count
  double critical_value = 0.0;
  double alpha = 0.05;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
};

/// 1-based rank ceil((1 - alpha) * replications) of the critical order
/// statistic, computed without floating-point overshoot.
std::size_t critical_rank(double alpha, std::size_t replications);

/// Simulates `replications` null datasets of size n and records T_S and S.
/// Replication r uses substream (seed, calibration stream for n, r), so the
/// result is a pure function of (spec, n, config) and is independent of the
/// worker count. A failing replication aborts with its index in the message.
CalibrationResult null_distribution(const TestSpec& spec, std::size_t n,
                                    const MonteCarloConfig& config);

/// (1 + #{simulated >= observed}) / (replications + 1).
double p_value(double observed, const CalibrationResult& calibration);

struct PowerPoint {
  std::size_t n = 0;
  double rejection_rate = 0.0;
  double standard_error = 0.0;  // binomial, at the observed rate
  double critical_value = 0.0;
};

/// Rejection rates of the alternative against the null critical value, one
/// point per n in config.n_grid. Alternative data come from a stream disjoint
/// from the calibration stream; a dataset is rejected when T_S exceeds the
/// critical value.
std::vector<PowerPoint> power_curve(const TestSpec& spec, const AlternativeSpec& alternative,
                                    const MonteCarloConfig& config);

struct ProbePoint {
  std::size_t n = 0;
  double detection_rate = 0.0;  // empirical P(S >= K)
  double median_statistic = 0.0;
};

struct ConsistencyReport {
  std::size_t declared_k = 1;
  double threshold = 0.8;
  std::vector<ProbePoint> points;
  bool detection_nondecreasing = false;
  bool statistic_nondecreasing = false;
  bool final_detection_above = false;

  bool passed() const noexcept {
    return detection_nondecreasing && statistic_nondecreasing && final_detection_above;
  }
};

/// Per n: empirical P(S >= K) and median T_S under the alternative. Passes
/// when both are non-decreasing along the grid and P(S >= K) at the largest n
/// exceeds `threshold`.
ConsistencyReport consistency_probe(const TestSpec& spec, const AlternativeSpec& alternative,
                                    const MonteCarloConfig& config, double threshold = 0.8);

struct TailRatePoint {
  std::size_t n = 0;
  double empirical_tail = 0.0;   // P(|mean - mu| >= y)
  double reference_rate = 0.0;   // 1 / r_n = exp(-n y^2 / (2 sigma))
};

struct TailRateReport {
  double deviation = 0.0;
  double factor = 2.0;
  std::vector<TailRatePoint> points;
  bool geometric = false;
};

struct BoundedSampler {
  std::function<double(Rng&)> draw;
  double mean = 0.0;
  double sd = 1.0;
};

/// Empirical tail of the sample mean for each n. `geometric` holds when each
/// step along the grid shrinks the tail by at least `factor` (a zero tail
/// must stay zero).
TailRateReport tail_rate_probe(const BoundedSampler& sampler, double y,
                               const std::vector<std::size_t>& n_grid, std::size_t replications,
                               std::uint64_t seed, double factor = 2.0, std::size_t workers = 0);

/// Rademacher variable: +-1 with probability 1/2.
BoundedSampler rademacher_sampler();

}  // namespace ntgof
