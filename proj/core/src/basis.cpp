#include "ntgof/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntgof/error.hpp"
#include "ntgof/quadrature.hpp"

namespace ntgof {

namespace {

void check_unit_interval(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InvalidArgument("basis: argument " + std::to_string(x) + " outside [0, 1]");
  }
}

// Fills out[j-1] = sqrt(2j+1) P_j(2x-1) for j = 1..out.size().
void legendre_recurrence(double x, std::span<double> out) {
  const double s = 2.0 * x - 1.0;
  double previous = 1.0;  // P_0
  double current = s;     // P_1
  for (std::size_t j = 1; j <= out.size(); ++j) {
    const auto jd = static_cast<double>(j);
    out[j - 1] = std::sqrt(2.0 * jd + 1.0) * current;
    const double next = ((2.0 * jd + 1.0) * s * current - jd * previous) / (jd + 1.0);
    previous = current;
    current = next;
  }
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(BasisKind kind, std::size_t max_degree,
                                   std::vector<Component> components)
    : kind_(kind), max_degree_(max_degree), components_(std::move(components)) {}

OrthonormalBasis OrthonormalBasis::legendre(std::size_t max_degree) {
  if (max_degree == 0) {
    throw InvalidArgument("legendre basis: max_degree must be positive");
  }
  return OrthonormalBasis(BasisKind::legendre_shifted, max_degree, {});
}

OrthonormalBasis OrthonormalBasis::user_supplied(std::vector<Component> components,
                                                 double tolerance) {
  if (components.empty()) {
    throw InvalidArgument("user basis: no components");
  }
  const auto rule = gauss_legendre(256);
  const std::size_t k = components.size();
  std::vector<std::vector<double>> values(k, std::vector<double>(rule.nodes.size()));
  for (std::size_t j = 0; j < k; ++j) {
    if (!components[j]) {
      throw InvalidArgument("user basis: empty component " + std::to_string(j + 1));
    }
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      values[j][q] = components[j](rule.nodes[q]);
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    double mean = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      mean += rule.weights[q] * values[i][q];
    }
    if (!(std::abs(mean) <= tolerance)) {
      throw InvalidArgument("user basis: component " + std::to_string(i + 1) +
                            " is not orthogonal to the constant");
    }
    for (std::size_t j = i; j < k; ++j) {
      double gram = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        gram += rule.weights[q] * values[i][q] * values[j][q];
      }
      const double target = (i == j) ? 1.0 : 0.0;
      if (!(std::abs(gram - target) <= tolerance)) {
        throw InvalidArgument("user basis: components " + std::to_string(i + 1) + " and " +
                              std::to_string(j + 1) + " are not orthonormal");
      }
    }
  }
  return OrthonormalBasis(BasisKind::user_supplied, k, std::move(components));
}

double OrthonormalBasis::operator()(std::size_t j, double x) const {
  if (j == 0 || j > max_degree_) {
    throw InvalidArgument("basis: component index " + std::to_string(j) + " out of range 1.." +
                          std::to_string(max_degree_));
  }
  check_unit_interval(x);
  if (kind_ == BasisKind::user_supplied) {
    return components_[j - 1](x);
  }
  const double s = 2.0 * x - 1.0;
  double previous = 1.0;
  double current = s;
  for (std::size_t m = 1; m < j; ++m) {
    const auto md = static_cast<double>(m);
    const double next = ((2.0 * md + 1.0) * s * current - md * previous) / (md + 1.0);
    previous = current;
    current = next;
  }
  return std::sqrt(2.0 * static_cast<double>(j) + 1.0) * current;
}

void OrthonormalBasis::evaluate_all(double x, std::span<double> out) const {
  if (out.size() > max_degree_) {
    throw InvalidArgument("basis: requested " + std::to_string(out.size()) +
                          " components, max_degree is " + std::to_string(max_degree_));
  }
  check_unit_interval(x);
  if (kind_ == BasisKind::user_supplied) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = components_[j](x);
    }
    return;
  }
  legendre_recurrence(x, out);
}

double eval_basis(const OrthonormalBasis& basis, std::size_t j, double x) {
  return basis(j, x);
}

double sup_norm_bound(std::size_t k) {
  if (k == 0) {
    throw InvalidArgument("sup_norm_bound: k must be positive");
  }
  if (k >= 2) {
    const auto kd = static_cast<double>(k);
    return std::sqrt((kd - 1.0) * (kd + 3.0));
  }
  // The closed form vanishes at k = 1; use the sup of |b_1| over a grid that
  // contains both endpoints.
  const auto basis = OrthonormalBasis::legendre(1);
  constexpr int kGrid = 1000;
  double sup = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    sup = std::max(sup, std::abs(basis(1, static_cast<double>(i) / kGrid)));
  }
  return sup;
}

double legendre_norm_sup(std::size_t k) {
  const auto kd = static_cast<double>(k);
  return std::sqrt(kd * (kd + 2.0));
}

}  // namespace ntgof
