#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>

namespace ntgof {

/// Large-deviation bound for the norm of a normalized sum of n i.i.d.
/// centred, isotropic k-vectors bounded in norm by `envelope`:
///
///   P(||n^{-1/2} sum Z_i|| >= y)
///     <= 150210 / Gamma(k/2) (y^2/2)^{(k-1)/2} exp{-(y^2/2)(1 - envelope y / sqrt(n))}.
///
/// The slack term is taken at its worst case envelope * y / sqrt(n).
/// Valid for 2k <= y^2 <= n / envelope^2; outside that window a WindowError
/// is thrown.
double prohorov_bound(std::size_t k, double y, double n, double envelope);

/// Validity window [sqrt(2k), sqrt(n) / envelope] of prohorov_bound, on the y scale.
std::pair<double, double> prohorov_window(std::size_t k, double n, double envelope);

/// Parameters of a majorant C1 phi1(k) phi2(lambda) y^{k-1} exp{-y^2 / C2}.
struct MajorantParams {
  double c1 = 1.0;
  double c2 = 1.0;
  std::function<double(std::size_t k)> phi1 = [](std::size_t) { return 1.0; };
  std::function<double(std::span<const double> eigenvalues)> phi2 =
      [](std::span<const double>) { return 1.0; };
  /// Optional [s(k,n), t(k,n)] on which the majorant is asserted. Unset means
  /// the whole half-line y >= 0.
  std::function<std::pair<double, double>(std::size_t k, double n)> window;
};

/// C1 phi1(k) phi2(eigenvalues) y^{k-1} exp{-y^2 / C2}. Throws WindowError
/// when y lies outside params.window(k, n), InvalidArgument when the
/// eigenvalue count differs from k or C1, C2 are not positive.
double ptype_majorant(const MajorantParams& params, std::size_t k, double y,
                      std::span<const double> eigenvalues, double n);

/// The prohorov_bound evaluated at a fixed y0 expressed as a P-type
/// majorant: C1 = 150210, phi1(k) = 2^{-(k-1)/2} / Gamma(k/2), phi2 = 1 and
/// C2 = 2 / (1 - envelope y0 / sqrt(n)). Agrees with prohorov_bound at y = y0.
MajorantParams prohorov_as_ptype(double y0, double n, double envelope);

using Majorant = std::function<double(std::size_t k, double y)>;

/// sum_{k=first}^{last} majorant(k, lower(k, n)). Throws InvalidArgument if
/// first > last; errors from individual terms propagate.
double b2_tail_sum(const Majorant& majorant, std::size_t first, std::size_t last,
                   const std::function<double(std::size_t k, double n)>& lower, double n);

}  // namespace ntgof
