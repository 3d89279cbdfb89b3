#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ntgof {

/// Gauss-Legendre rule mapped to [lower, upper].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Builds an `points`-node Gauss-Legendre rule on [lower, upper]. Nodes are
/// computed by Newton iteration on the Legendre polynomial, so the rule is
/// accurate to machine precision for a few hundred points.
QuadratureRule gauss_legendre(std::size_t points, double lower = 0.0, double upper = 1.0);

/// Integrates f with the given rule.
double integrate(const QuadratureRule& rule, const std::function<double(double)>& f);

struct SimpsonOptions {
  double abs_tol = 1e-9;
  int max_depth = 50;
};

/// Adaptive Simpson quadrature with Richardson correction.
/// Throws NumericError when the recursion depth is exhausted before the local
/// error estimate falls below the (split) tolerance, or when f returns a
/// non-finite value.
double adaptive_simpson(const std::function<double(double)>& f, double lower, double upper,
                        SimpsonOptions options = {});

/// Vector-valued adaptive Simpson: integrates every component of
/// f(x, out) over [lower, upper], refining an interval until all components
/// meet the tolerance. Shares integrand evaluations across components.
std::vector<double> adaptive_simpson(
    const std::function<void(double, std::span<double>)>& f, std::size_t components,
    double lower, double upper, SimpsonOptions options = {});

}  // namespace ntgof
