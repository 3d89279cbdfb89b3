#include "ntgof/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "ntgof/error.hpp"
#include "ntgof/parallel.hpp"

namespace ntgof {

namespace {

constexpr std::uint64_t kCalibrationStream = 0x43414c4942ULL;
constexpr std::uint64_t kAlternativeStream = 0x414c5445524eULL;
constexpr std::uint64_t kTailStream = 0x5441494cULL;

std::uint64_t stream_for(std::uint64_t base, std::size_t n) {
  return mix64(base ^ mix64(static_cast<std::uint64_t>(n)));
}

struct Replicate {
  double statistic = 0.0;
  std::size_t selected = 1;
};

// Runs one replication, re-throwing failures with the replication index.
template <class F>
Replicate run_replication(std::size_t index, F&& body) {
  try {
    return body();
  } catch (const NumericError& e) {
    throw NumericError("replication " + std::to_string(index) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("replication " + std::to_string(index) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("replication " + std::to_string(index) + ": " + e.what());
  }
}

std::vector<Replicate> simulate(const TestSpec& spec, std::size_t n, std::size_t replications,
                                std::uint64_t seed, std::uint64_t stream, std::size_t workers,
                                const std::function<Sample(std::size_t, Rng&)>& sampler) {
  std::vector<Replicate> out(replications);
  parallel_for(replications, resolve_workers(workers), [&](std::size_t r) {
    out[r] = run_replication(r, [&] {
      Rng rng = substream(seed, stream, r);
      const Sample sample = sampler(n, rng);
      const TestOutcome outcome = run_test(spec, sample);
      return Replicate{outcome.statistic(), outcome.selection.selected};
    });
  });
  return out;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  return (m % 2 == 1) ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

}  // namespace

void MonteCarloConfig::validate() const {
  if (replications < 100) {
    throw InvalidArgument("Monte Carlo: need at least 100 replications");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("Monte Carlo: alpha must lie in (0, 1)");
  }
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (!(n_grid[i] > n_grid[i - 1])) {
      throw InvalidArgument("Monte Carlo: n_grid must be strictly increasing");
    }
  }
}

std::size_t critical_rank(double alpha, std::size_t replications) {
  const double target = (1.0 - alpha) * static_cast<double>(replications);
  auto rank = static_cast<std::size_t>(std::ceil(target - 1e-9 * std::max(1.0, target)));
  return std::clamp<std::size_t>(rank, 1, replications);
}

CalibrationResult null_distribution(const TestSpec& spec, std::size_t n,
                                    const MonteCarloConfig& config) {
  config.validate();
  const auto replicates =
      simulate(spec, n, config.replications, config.seed, stream_for(kCalibrationStream, n),
               config.workers, [&spec](std::size_t size, Rng& rng) {
                 return sample_null(spec, size, rng);
               });
  CalibrationResult result;
  result.n = n;
  result.alpha = config.alpha;
  result.replications = config.replications;
  result.seed = config.seed;
  result.selected_counts.assign(spec.dimension(n), 0);
  result.statistics.reserve(replicates.size());
  for (const auto& rep : replicates) {
    result.statistics.push_back(rep.statistic);
    if (rep.selected > result.selected_counts.size()) {
      result.selected_counts.resize(rep.selected, 0);
    }
    ++result.selected_counts[rep.selected - 1];
  }
  std::sort(result.statistics.begin(), result.statistics.end());
  result.critical_value = result.statistics[critical_rank(config.alpha, config.replications) - 1];
  return result;
}

double p_value(double observed, const CalibrationResult& calibration) {
  if (calibration.statistics.empty()) {
    throw InvalidArgument("p_value: empty calibration");
  }
  const auto& sims = calibration.statistics;
  const auto first_ge = std::lower_bound(sims.begin(), sims.end(), observed);
  const auto exceed = static_cast<double>(std::distance(first_ge, sims.end()));
  return (1.0 + exceed) / (static_cast<double>(sims.size()) + 1.0);
}

std::vector<PowerPoint> power_curve(const TestSpec& spec, const AlternativeSpec& alternative,
                                    const MonteCarloConfig& config) {
  config.validate();
  if (!alternative.sampler) {
    throw InvalidArgument("power_curve: alternative has no sampler");
  }
  std::vector<PowerPoint> curve;
  for (const std::size_t n : config.n_grid) {
    const auto calibration = null_distribution(spec, n, config);
    const auto replicates =
        simulate(spec, n, config.replications, config.seed, stream_for(kAlternativeStream, n),
                 config.workers, alternative.sampler);
    std::size_t rejected = 0;
    for (const auto& rep : replicates) {
      rejected += rep.statistic > calibration.critical_value ? 1 : 0;
    }
    const auto reps = static_cast<double>(config.replications);
    PowerPoint point;
    point.n = n;
    point.rejection_rate = static_cast<double>(rejected) / reps;
    point.standard_error = std::sqrt(point.rejection_rate * (1.0 - point.rejection_rate) / reps);
    point.critical_value = calibration.critical_value;
    curve.push_back(point);
  }
  return curve;
}

ConsistencyReport consistency_probe(const TestSpec& spec, const AlternativeSpec& alternative,
                                    const MonteCarloConfig& config, double threshold) {
  config.validate();
  if (!alternative.sampler) {
    throw InvalidArgument("consistency_probe: alternative has no sampler");
  }
  if (config.n_grid.empty()) {
    throw InvalidArgument("consistency_probe: empty n_grid");
  }
  ConsistencyReport report;
  report.declared_k = alternative.first_component;
  report.threshold = threshold;
  for (const std::size_t n : config.n_grid) {
    const auto replicates =
        simulate(spec, n, config.replications, config.seed, stream_for(kAlternativeStream, n),
                 config.workers, alternative.sampler);
    std::size_t detected = 0;
    std::vector<double> stats;
    stats.reserve(replicates.size());
    for (const auto& rep : replicates) {
      detected += rep.selected >= alternative.first_component ? 1 : 0;
      stats.push_back(rep.statistic);
    }
    report.points.push_back(
        {n, static_cast<double>(detected) / static_cast<double>(config.replications),
         median_of(std::move(stats))});
  }
  report.detection_nondecreasing = true;
  report.statistic_nondecreasing = true;
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    report.detection_nondecreasing &=
        report.points[i].detection_rate >= report.points[i - 1].detection_rate;
    report.statistic_nondecreasing &=
        report.points[i].median_statistic >= report.points[i - 1].median_statistic;
  }
  report.final_detection_above = report.points.back().detection_rate > threshold;
  return report;
}

TailRateReport tail_rate_probe(const BoundedSampler& sampler, double y,
                               const std::vector<std::size_t>& n_grid, std::size_t replications,
                               std::uint64_t seed, double factor, std::size_t workers) {
  if (!sampler.draw || n_grid.empty() || replications == 0) {
    throw InvalidArgument("tail_rate_probe: need a sampler, a grid and replications");
  }
  if (!(y >= 0.0)) {
    throw InvalidArgument("tail_rate_probe: deviation must be non-negative");
  }
  TailRateReport report;
  report.deviation = y;
  report.factor = factor;
  for (const std::size_t n : n_grid) {
    std::vector<unsigned char> hit(replications, 0);
    const std::uint64_t stream = stream_for(kTailStream, n);
    parallel_for(replications, resolve_workers(workers), [&](std::size_t r) {
      Rng rng = substream(seed, stream, r);
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sum += sampler.draw(rng);
      }
      hit[r] = std::abs(sum / static_cast<double>(n) - sampler.mean) >= y ? 1 : 0;
    });
    const auto count = std::count(hit.begin(), hit.end(), 1);
    TailRatePoint point;
    point.n = n;
    point.empirical_tail = static_cast<double>(count) / static_cast<double>(replications);
    point.reference_rate = std::exp(-static_cast<double>(n) * y * y / (2.0 * sampler.sd));
    report.points.push_back(point);
  }
  report.geometric = true;
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    const double previous = report.points[i - 1].empirical_tail;
    const double current = report.points[i].empirical_tail;
    report.geometric &= current * factor <= previous;
  }
  return report;
}

BoundedSampler rademacher_sampler() {
  return {[](Rng& rng) { return (rng() >> 63) != 0 ? 1.0 : -1.0; }, 0.0, 1.0};
}

}  // namespace ntgof
