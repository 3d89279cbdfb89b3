#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ntgof {

enum class PenaltyKind { schwarz, linear_2k, user_table };

/// Dimension penalty pi(k, n), strictly increasing in k with increments
/// pi(k, n) - pi(1, n) that diverge in n.
class PenaltySchedule {
 public:
  using Evaluator = std::function<double(std::size_t k, double n)>;

  /// pi(k, n) = k log n.
  static PenaltySchedule schwarz();
  /// pi(k, n) = 2k, so Delta(k, n) = 2(k - 1) independently of n.
  static PenaltySchedule linear_2k();
  /// Lookup table keyed by (k, n); n is matched after rounding to an integer.
  static PenaltySchedule table(std::map<std::pair<std::size_t, long long>, double> entries);
  /// Arbitrary user function, reported as kind user_table.
  static PenaltySchedule user(std::string label, Evaluator evaluator);

  PenaltyKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

  double operator()(std::size_t k, double n) const;
  /// Delta(k, n) = pi(k, n) - pi(1, n).
  double delta(std::size_t k, double n) const;

 private:
  PenaltySchedule(PenaltyKind kind, std::string label, Evaluator evaluator);

  PenaltyKind kind_;
  std::string label_;
  Evaluator evaluator_;
};

/// Schwarz penalty k log n. Throws InvalidArgument for k < 1 or n < 2.
double schwarz_penalty(std::size_t k, double n);

/// Control sequence d(n): the largest dimension considered at sample size n.
class DimensionBudget {
 public:
  using Rule = std::function<std::size_t(std::size_t n)>;

  /// d(n) = min(cap, max(2, floor(n^{1/4}))).
  static DimensionBudget automatic(std::size_t cap = 12);
  /// d(n) = min(cap, floor(n^{1/4})), at least 1.
  static DimensionBudget fourth_root(std::size_t cap);
  /// d(n) = d for every n.
  static DimensionBudget fixed(std::size_t d);
  static DimensionBudget custom(Rule rule, std::size_t cap);

  std::size_t operator()(std::size_t n) const;
  std::size_t cap() const noexcept { return cap_; }

 private:
  DimensionBudget(Rule rule, std::size_t cap);

  Rule rule_;
  std::size_t cap_;
};

/// floor(n^{1/4}) computed exactly in integers.
std::size_t integer_fourth_root(std::size_t n);

struct SelectionOutcome {
  std::size_t selected = 1;           // S, 1-based
  std::vector<double> series;         // T_1 .. T_d
  std::vector<double> penalties;      // pi(1, n) .. pi(d, n)
  std::vector<double> penalized;      // T_k - pi(k, n)
  double statistic = 0.0;             // T_S
};

/// S = min{k : T_k - pi(k, n) >= T_j - pi(j, n) for all j <= d}, with exact
/// floating point comparison. Throws InvalidArgument for an empty series and
/// NumericError for a non-finite penalized value.
SelectionOutcome select_dimension(std::span<const double> series, const PenaltySchedule& penalty,
                                  double n);

struct ConditionCheck {
  std::string name;
  bool passed = true;
  std::string detail;  // first violation, empty on success
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;
  std::vector<std::string> warnings;

  bool passed() const;
  const ConditionCheck* find(const std::string& name) const;
};

/// lambda_k^{(k)}, the smallest eigenvalue of L_k, as a function of (k, n).
using EigenvalueProvider = std::function<double(std::size_t k, double n)>;

/// Checks the penalty contract on a finite grid of sample sizes:
///  - "monotone_in_k": pi(1,n) < ... < pi(d(n),n) at every grid point;
///  - "divergent_increments": Delta(j,n) non-decreasing along the grid and
///    strictly larger at the last point than at the first, for 2 <= j <= max d(n);
///  - "vanishing_ratio": sup_{k<=d(n)} pi(k,n) / (n lambda_k) strictly
///    decreasing along the grid.
/// Limits are judged as trends on the grid. A warning is attached wherever
/// Delta(k,n) < 2k for some 2 <= k <= d(n). Never throws on a failed check;
/// throws InvalidArgument if the grid has fewer than 3 increasing points.
ValidationReport validate_penalty(const PenaltySchedule& penalty, const DimensionBudget& budget,
                                  const EigenvalueProvider& eigenvalue, std::span<const double> n_grid);

enum class EnvelopeScale {
  penalty,       // s(k,n) <= Delta(k,n) <= t(k,n)
  root_penalty,  // s(k,n) <= sqrt(Delta(k,n)) <= t(k,n), the norm scale of the Prohorov window
};

struct ProperWeightSpec {
  std::function<double(std::size_t k, double n)> lower;  // s(k, n)
  std::function<double(std::size_t k, double n)> upper;  // t(k, n)
  std::function<std::size_t(double n)> u;                // u_n
  std::function<std::size_t(double n)> m;                // m_n
  EnvelopeScale scale = EnvelopeScale::penalty;
};

/// Checks the proper-weight conditions on the (k, n) grid:
///  - "sandwich": s <= Delta <= t (or its root-scale variant) at every point;
///  - "lower_ratio_vanishes": sup_{k<=u_n} s(k,n)/(n lambda_k) strictly
///    decreasing along the distinct n of the grid;
///  - "penalty_ratio_vanishes": sup_{k<=m_n} pi(k,n)/(n lambda_k) likewise.
/// Each check reports its first violation.
ValidationReport check_proper_weight(const ProperWeightSpec& spec, const PenaltySchedule& penalty,
                                     std::span<const std::pair<std::size_t, double>> grid,
                                     const EigenvalueProvider& eigenvalue);

}  // namespace ntgof
