#include "ntgof/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "ntgof/error.hpp"

namespace ntgof {

PenaltySchedule::PenaltySchedule(PenaltyKind kind, std::string label, Evaluator evaluator)
    : kind_(kind), label_(std::move(label)), evaluator_(std::move(evaluator)) {}

PenaltySchedule PenaltySchedule::schwarz() {
  return PenaltySchedule(PenaltyKind::schwarz, "schwarz",
                         [](std::size_t k, double n) { return schwarz_penalty(k, n); });
}

PenaltySchedule PenaltySchedule::linear_2k() {
  return PenaltySchedule(PenaltyKind::linear_2k, "linear2k", [](std::size_t k, double) {
    return 2.0 * static_cast<double>(k);
  });
}

PenaltySchedule PenaltySchedule::table(std::map<std::pair<std::size_t, long long>, double> entries) {
  if (entries.empty()) {
    throw InvalidArgument("penalty table is empty");
  }
  return PenaltySchedule(
      PenaltyKind::user_table, "table",
      [entries = std::move(entries)](std::size_t k, double n) {
        const auto key = std::make_pair(k, std::llround(n));
        const auto it = entries.find(key);
        if (it == entries.end()) {
          throw InvalidArgument("penalty table has no entry for k=" + std::to_string(k) +
                                ", n=" + std::to_string(key.second));
        }
        return it->second;
      });
}

PenaltySchedule PenaltySchedule::user(std::string label, Evaluator evaluator) {
  if (!evaluator) {
    throw InvalidArgument("user penalty: empty evaluator");
  }
  return PenaltySchedule(PenaltyKind::user_table, std::move(label), std::move(evaluator));
}

double PenaltySchedule::operator()(std::size_t k, double n) const {
  if (k == 0) {
    throw InvalidArgument("penalty: k must be at least 1");
  }
  return evaluator_(k, n);
}

double PenaltySchedule::delta(std::size_t k, double n) const {
  return (*this)(k, n) - (*this)(1, n);
}

double schwarz_penalty(std::size_t k, double n) {
  if (k == 0) {
    throw InvalidArgument("schwarz_penalty: k must be at least 1");
  }
  if (!(n >= 2.0)) {
    throw InvalidArgument("schwarz_penalty: n must be at least 2");
  }
  return static_cast<double>(k) * std::log(n);
}

std::size_t integer_fourth_root(std::size_t n) {
  auto r = static_cast<std::size_t>(std::floor(std::sqrt(std::sqrt(static_cast<double>(n)))));
  auto fourth = [](std::size_t v) { return v * v * v * v; };
  while (r > 0 && fourth(r) > n) {
    --r;
  }
  while (fourth(r + 1) <= n) {
    ++r;
  }
  return r;
}

DimensionBudget::DimensionBudget(Rule rule, std::size_t cap) : rule_(std::move(rule)), cap_(cap) {
  if (cap_ == 0) {
    throw InvalidArgument("dimension budget: cap must be positive");
  }
}

DimensionBudget DimensionBudget::automatic(std::size_t cap) {
  return DimensionBudget(
      [](std::size_t n) { return std::max<std::size_t>(2, integer_fourth_root(n)); }, cap);
}

DimensionBudget DimensionBudget::fourth_root(std::size_t cap) {
  return DimensionBudget([](std::size_t n) { return integer_fourth_root(n); }, cap);
}

DimensionBudget DimensionBudget::fixed(std::size_t d) {
  return DimensionBudget([d](std::size_t) { return d; }, d);
}

DimensionBudget DimensionBudget::custom(Rule rule, std::size_t cap) {
  if (!rule) {
    throw InvalidArgument("dimension budget: empty rule");
  }
  return DimensionBudget(std::move(rule), cap);
}

std::size_t DimensionBudget::operator()(std::size_t n) const {
  return std::clamp<std::size_t>(rule_(n), 1, cap_);
}

SelectionOutcome select_dimension(std::span<const double> series, const PenaltySchedule& penalty,
                                  double n) {
  if (series.empty()) {
    throw InvalidArgument("select_dimension: empty statistic series");
  }
  SelectionOutcome outcome;
  outcome.series.assign(series.begin(), series.end());
  outcome.penalties.resize(series.size());
  outcome.penalized.resize(series.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= series.size(); ++k) {
    const double pi = penalty(k, n);
    const double value = series[k - 1] - pi;
    if (!std::isfinite(value)) {
      throw NumericError("select_dimension: penalized value for k=" + std::to_string(k) +
                         " is not finite");
    }
    outcome.penalties[k - 1] = pi;
    outcome.penalized[k - 1] = value;
    // Strict comparison keeps the smallest index among ties.
    if (value > best) {
      best = value;
      outcome.selected = k;
    }
  }
  outcome.statistic = series[outcome.selected - 1];
  return outcome;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ConditionCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& check : checks) {
    if (check.name == name) {
      return &check;
    }
  }
  return nullptr;
}

namespace {

void fail(ConditionCheck& check, const std::string& message) {
  if (check.passed) {
    check.passed = false;
    check.detail = message;
  }
}

std::string point(std::size_t k, double n) {
  std::ostringstream out;
  out << "k=" << k << ", n=" << n;
  return out.str();
}

// Evaluates `f` and converts evaluation errors into a failed check.
template <class F>
bool guarded(ConditionCheck& check, F&& f) {
  try {
    f();
    return true;
  } catch (const std::exception& e) {
    fail(check, e.what());
    return false;
  }
}

void require_strictly_decreasing(ConditionCheck& check, const std::vector<double>& ns,
                                 const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1])) {
      std::ostringstream out;
      out << "sup ratio " << values[i] << " at n=" << ns[i] << " does not decrease from "
          << values[i - 1] << " at n=" << ns[i - 1];
      fail(check, out.str());
      return;
    }
  }
}

}  // namespace

ValidationReport validate_penalty(const PenaltySchedule& penalty, const DimensionBudget& budget,
                                  const EigenvalueProvider& eigenvalue,
                                  std::span<const double> n_grid) {
  if (n_grid.size() < 3) {
    throw InvalidArgument("validate_penalty: need at least 3 grid points");
  }
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (!(n_grid[i] > n_grid[i - 1])) {
      throw InvalidArgument("validate_penalty: grid must be strictly increasing");
    }
  }
  ValidationReport report;
  ConditionCheck monotone{"monotone_in_k", true, {}};
  ConditionCheck divergent{"divergent_increments", true, {}};
  ConditionCheck vanishing{"vanishing_ratio", true, {}};

  std::size_t max_d = 2;
  std::vector<double> ratios;
  for (const double n : n_grid) {
    const std::size_t d = budget(static_cast<std::size_t>(std::llround(n)));
    max_d = std::max(max_d, d);
    guarded(monotone, [&] {
      for (std::size_t k = 2; k <= d; ++k) {
        if (!(penalty(k, n) > penalty(k - 1, n))) {
          fail(monotone, "pi not strictly increasing at " + point(k, n));
          return;
        }
      }
    });
    double sup = -std::numeric_limits<double>::infinity();
    guarded(vanishing, [&] {
      for (std::size_t k = 1; k <= d; ++k) {
        sup = std::max(sup, penalty(k, n) / (n * eigenvalue(k, n)));
      }
    });
    ratios.push_back(sup);
    guarded(divergent, [&] {
      for (std::size_t k = 2; k <= d; ++k) {
        if (penalty.delta(k, n) < 2.0 * static_cast<double>(k)) {
          report.warnings.push_back("Delta(k,n) < 2k at " + point(k, n) +
                                    "; large-deviation consistency bounds do not apply");
          return;
        }
      }
    });
  }
  std::vector<double> ns(n_grid.begin(), n_grid.end());
  if (vanishing.passed) {
    require_strictly_decreasing(vanishing, ns, ratios);
  }
  for (std::size_t j = 2; j <= max_d && divergent.passed; ++j) {
    guarded(divergent, [&] {
      double previous = penalty.delta(j, n_grid[0]);
      const double first = previous;
      for (std::size_t i = 1; i < n_grid.size(); ++i) {
        const double current = penalty.delta(j, n_grid[i]);
        if (current < previous) {
          fail(divergent, "Delta decreases at " + point(j, n_grid[i]));
          return;
        }
        previous = current;
      }
      if (!(previous > first)) {
        fail(divergent, "Delta(" + std::to_string(j) + ", n) does not grow along the grid");
      }
    });
  }
  report.checks = {monotone, divergent, vanishing};
  return report;
}

ValidationReport check_proper_weight(const ProperWeightSpec& spec, const PenaltySchedule& penalty,
                                     std::span<const std::pair<std::size_t, double>> grid,
                                     const EigenvalueProvider& eigenvalue) {
  if (grid.empty()) {
    throw InvalidArgument("check_proper_weight: empty grid");
  }
  if (!spec.lower || !spec.upper || !spec.u || !spec.m) {
    throw InvalidArgument("check_proper_weight: incomplete specification");
  }
  ValidationReport report;
  ConditionCheck sandwich{"sandwich", true, {}};
  ConditionCheck lower_ratio{"lower_ratio_vanishes", true, {}};
  ConditionCheck penalty_ratio{"penalty_ratio_vanishes", true, {}};

  std::set<double> distinct_n;
  for (const auto& [k, n] : grid) {
    distinct_n.insert(n);
    if (!sandwich.passed) {
      continue;
    }
    guarded(sandwich, [&, k = k, n = n] {
      const double delta = penalty.delta(k, n);
      const double middle =
          spec.scale == EnvelopeScale::root_penalty ? std::sqrt(std::max(0.0, delta)) : delta;
      const double s = spec.lower(k, n);
      const double t = spec.upper(k, n);
      if (!(s <= middle && middle <= t)) {
        std::ostringstream out;
        out << "s=" << s << ", increment=" << middle << ", t=" << t << " at " << point(k, n);
        fail(sandwich, out.str());
      }
    });
  }

  const std::vector<double> ns(distinct_n.begin(), distinct_n.end());
  std::vector<double> lower_sup;
  std::vector<double> penalty_sup;
  for (const double n : ns) {
    double sup_s = -std::numeric_limits<double>::infinity();
    double sup_pi = -std::numeric_limits<double>::infinity();
    guarded(lower_ratio, [&] {
      for (std::size_t k = 1; k <= spec.u(n); ++k) {
        sup_s = std::max(sup_s, spec.lower(k, n) / (n * eigenvalue(k, n)));
      }
    });
    guarded(penalty_ratio, [&] {
      for (std::size_t k = 1; k <= spec.m(n); ++k) {
        sup_pi = std::max(sup_pi, penalty(k, n) / (n * eigenvalue(k, n)));
      }
    });
    lower_sup.push_back(sup_s);
    penalty_sup.push_back(sup_pi);
  }
  if (lower_ratio.passed) {
    require_strictly_decreasing(lower_ratio, ns, lower_sup);
  }
  if (penalty_ratio.passed) {
    require_strictly_decreasing(penalty_ratio, ns, penalty_sup);
  }
  report.checks = {sandwich, lower_ratio, penalty_ratio};
  return report;
}

}  // namespace ntgof
