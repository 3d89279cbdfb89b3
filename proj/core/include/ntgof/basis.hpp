#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ntgof {

enum class BasisKind { legendre_shifted, user_supplied };

/// An orthonormal system b_1, ..., b_max on [0, 1], each component orthogonal
/// to the constant function. Immutable after construction.
class OrthonormalBasis {
 public:
  using Component = std::function<double(double)>;

  /// Shifted Legendre polynomials, b_j(x) = sqrt(2j+1) P_j(2x - 1).
  static OrthonormalBasis legendre(std::size_t max_degree);

  /// Wraps caller-provided components. Orthonormality and orthogonality to
  /// the constant are checked with a 256-node Gauss-Legendre rule; any Gram
  /// entry off by more than `tolerance` throws InvalidArgument.
  static OrthonormalBasis user_supplied(std::vector<Component> components,
                                        double tolerance = 1e-8);

  BasisKind kind() const noexcept { return kind_; }
  std::size_t max_degree() const noexcept { return max_degree_; }

  /// b_j(x) for 1 <= j <= max_degree, x in [0, 1].
  double operator()(std::size_t j, double x) const;

  /// Writes b_1(x), ..., b_{out.size()}(x) into `out`.
  void evaluate_all(double x, std::span<double> out) const;

 private:
  OrthonormalBasis(BasisKind kind, std::size_t max_degree, std::vector<Component> components);

  BasisKind kind_;
  std::size_t max_degree_;
  std::vector<Component> components_;
};

/// Free-function form of OrthonormalBasis::operator().
double eval_basis(const OrthonormalBasis& basis, std::size_t j, double x);

/// Envelope M(k) used by the Prohorov bound for the Legendre score vector.
/// For k >= 2 this is sqrt((k-1)(k+3)); for k = 1 it is the numeric sup of
/// |b_1| on [0, 1], which is sqrt(3).
///
/// Note that the exact sup of the Euclidean norm of (b_1(x), ..., b_k(x)) is
/// sqrt(k(k+2)), attained at x = 0 and x = 1; see legendre_norm_sup().
double sup_norm_bound(std::size_t k);

/// Exact sup over [0, 1] of sqrt(b_1(x)^2 + ... + b_k(x)^2) for shifted
/// Legendre polynomials.
double legendre_norm_sup(std::size_t k);

}  // namespace ntgof
