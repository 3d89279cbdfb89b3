#include "ntgof/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ntgof/error.hpp"

namespace ntgof {

QuadratureRule gauss_legendre(std::size_t points, double lower, double upper) {
  if (points == 0) {
    throw InvalidArgument("gauss_legendre: need at least one node");
  }
  if (!(upper > lower)) {
    throw InvalidArgument("gauss_legendre: empty interval");
  }
  QuadratureRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const double half_width = 0.5 * (upper - lower);
  const double mid = 0.5 * (upper + lower);
  const auto n = static_cast<double>(points);
  const std::size_t half = (points + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi's initial guess for the i-th root of P_n on [-1, 1].
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t j = 0; j < points; ++j) {
        const auto jd = static_cast<double>(j);
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * jd + 1.0) * z * p1 - jd * p2) / (jd + 1.0);
      }
      derivative = n * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / derivative;
      z -= step;
      if (std::abs(step) < 1e-16) {
        break;
      }
    }
    const double weight = 2.0 / ((1.0 - z * z) * derivative * derivative);
    rule.nodes[i] = mid - half_width * z;
    rule.nodes[points - 1 - i] = mid + half_width * z;
    rule.weights[i] = half_width * weight;
    rule.weights[points - 1 - i] = half_width * weight;
  }
  return rule;
}

double integrate(const QuadratureRule& rule, const std::function<double(double)>& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(rule.nodes[i]);
  }
  return sum;
}

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int max_depth;
};

double checked(const std::function<double(double)>& f, double x) {
  const double value = f(x);
  if (!std::isfinite(value)) {
    throw NumericError("adaptive_simpson: integrand is not finite");
  }
  return value;
}

double simpson_step(const SimpsonState& state, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = checked(state.f, lm);
  const double frm = checked(state.f, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth >= state.max_depth) {
    throw NumericError("adaptive_simpson: tolerance not reached at maximum depth");
  }
  return simpson_step(state, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_step(state, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lower, double upper,
                        SimpsonOptions options) {
  if (lower == upper) {
    return 0.0;
  }
  if (!(upper > lower)) {
    throw InvalidArgument("adaptive_simpson: lower bound exceeds upper bound");
  }
  const SimpsonState state{f, options.max_depth};
  // Seed with a fixed 8-panel split so narrow features are not missed by the
  // first three samples.
  constexpr int kPanels = 8;
  const double width = (upper - lower) / kPanels;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double a = lower + p * width;
    const double b = (p + 1 == kPanels) ? upper : a + width;
    const double m = 0.5 * (a + b);
    const double fa = checked(f, a);
    const double fm = checked(f, m);
    const double fb = checked(f, b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_step(state, a, b, fa, fm, fb, whole, options.abs_tol / kPanels, 0);
  }
  return total;
}

namespace {

// Vector Simpson recursion over a per-depth scratch area: level d owns four
// rows (left-mid values, right-mid values, left estimate, right estimate).
struct VectorSimpson {
  const std::function<void(double, std::span<double>)>& f;
  std::size_t components;
  int max_depth;
  std::vector<double> scratch;

  std::span<double> row(int depth, int slot) {
    const std::size_t offset =
        (static_cast<std::size_t>(depth) * 4 + static_cast<std::size_t>(slot)) * components;
    return {scratch.data() + offset, components};
  }

  void eval(double x, std::span<double> out) const {
    f(x, out);
    for (const double value : out) {
      if (!std::isfinite(value)) {
        throw NumericError("adaptive_simpson: integrand is not finite");
      }
    }
  }

  void step(double a, double b, std::span<const double> fa, std::span<const double> fm,
            std::span<const double> fb, std::span<const double> whole, double tol, int depth,
            std::span<double> total) {
    const double m = 0.5 * (a + b);
    auto flm = row(depth, 0);
    auto frm = row(depth, 1);
    auto left = row(depth, 2);
    auto right = row(depth, 3);
    eval(0.5 * (a + m), flm);
    eval(0.5 * (m + b), frm);
    double worst = 0.0;
    for (std::size_t c = 0; c < components; ++c) {
      left[c] = (m - a) / 6.0 * (fa[c] + 4.0 * flm[c] + fm[c]);
      right[c] = (b - m) / 6.0 * (fm[c] + 4.0 * frm[c] + fb[c]);
      worst = std::max(worst, std::abs(left[c] + right[c] - whole[c]));
    }
    if (worst <= 15.0 * tol) {
      for (std::size_t c = 0; c < components; ++c) {
        const double delta = left[c] + right[c] - whole[c];
        total[c] += left[c] + right[c] + delta / 15.0;
      }
      return;
    }
    if (depth >= max_depth) {
      throw NumericError("adaptive_simpson: tolerance not reached at maximum depth");
    }
    step(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, total);
    step(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, total);
  }
};

}  // namespace

std::vector<double> adaptive_simpson(
    const std::function<void(double, std::span<double>)>& f, std::size_t components,
    double lower, double upper, SimpsonOptions options) {
  std::vector<double> total(components, 0.0);
  if (lower == upper) {
    return total;
  }
  if (!(upper > lower)) {
    throw InvalidArgument("adaptive_simpson: lower bound exceeds upper bound");
  }
  VectorSimpson state{f, components, options.max_depth,
                      std::vector<double>(static_cast<std::size_t>(options.max_depth + 2) * 4 *
                                          components)};
  std::vector<double> ends(4 * components);
  std::span<double> fa(ends.data(), components);
  std::span<double> fm(ends.data() + components, components);
  std::span<double> fb(ends.data() + 2 * components, components);
  std::span<double> whole(ends.data() + 3 * components, components);
  constexpr int kPanels = 8;
  const double width = (upper - lower) / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double a = lower + p * width;
    const double b = (p + 1 == kPanels) ? upper : a + width;
    state.eval(a, fa);
    state.eval(0.5 * (a + b), fm);
    state.eval(b, fb);
    for (std::size_t c = 0; c < components; ++c) {
      whole[c] = (b - a) / 6.0 * (fa[c] + 4.0 * fm[c] + fb[c]);
    }
    state.step(a, b, fa, fm, fb, whole, options.abs_tol / kPanels, 0, total);
  }
  return total;
}

}  // namespace ntgof
