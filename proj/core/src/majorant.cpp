#include "ntgof/majorant.hpp"

#include <cmath>
#include <sstream>

#include "ntgof/error.hpp"

namespace ntgof {

namespace {

constexpr double kProhorovConstant = 150210.0;
// Relative slack on window edges so that y = sqrt(2k) computed in floating
// point is accepted.
constexpr double kEdgeSlack = 1e-12;

}  // namespace

std::pair<double, double> prohorov_window(std::size_t k, double n, double envelope) {
  return {std::sqrt(2.0 * static_cast<double>(k)), std::sqrt(n) / envelope};
}

double prohorov_bound(std::size_t k, double y, double n, double envelope) {
  if (k == 0 || !(n > 0.0) || !(envelope > 0.0)) {
    throw InvalidArgument("prohorov_bound: need k >= 1, n > 0, envelope > 0");
  }
  const double y2 = y * y;
  const double kd = static_cast<double>(k);
  if (!(y >= 0.0) || y2 < 2.0 * kd * (1.0 - kEdgeSlack) ||
      y2 * envelope * envelope > n * (1.0 + kEdgeSlack)) {
    std::ostringstream out;
    out << "prohorov_bound: y=" << y << " outside window 2k <= y^2 <= n/M^2 (k=" << k
        << ", n=" << n << ", M=" << envelope << ")";
    throw WindowError(out.str());
  }
  const double eta = envelope * y / std::sqrt(n);
  const double log_value = std::log(kProhorovConstant) - std::lgamma(0.5 * kd) +
                           0.5 * (kd - 1.0) * std::log(0.5 * y2) - 0.5 * y2 * (1.0 - eta);
  return std::exp(log_value);
}

double ptype_majorant(const MajorantParams& params, std::size_t k, double y,
                      std::span<const double> eigenvalues, double n) {
  if (!(params.c1 > 0.0) || !(params.c2 > 0.0)) {
    throw InvalidArgument("ptype_majorant: C1 and C2 must be positive");
  }
  if (k == 0 || eigenvalues.size() != k) {
    throw InvalidArgument("ptype_majorant: need k >= 1 eigenvalues, got " +
                          std::to_string(eigenvalues.size()) + " for k=" + std::to_string(k));
  }
  if (params.window) {
    const auto [lower, upper] = params.window(k, n);
    if (!(y >= lower * (1.0 - kEdgeSlack) && y <= upper * (1.0 + kEdgeSlack))) {
      std::ostringstream out;
      out << "ptype_majorant: y=" << y << " outside window [" << lower << ", " << upper << "]";
      throw WindowError(out.str());
    }
  } else if (!(y >= 0.0)) {
    throw WindowError("ptype_majorant: y must be non-negative");
  }
  const double kd = static_cast<double>(k);
  return params.c1 * params.phi1(k) * params.phi2(eigenvalues) * std::pow(y, kd - 1.0) *
         std::exp(-y * y / params.c2);
}

MajorantParams prohorov_as_ptype(double y0, double n, double envelope) {
  const double eta = envelope * y0 / std::sqrt(n);
  if (!(eta < 1.0)) {
    throw WindowError("prohorov_as_ptype: envelope * y0 / sqrt(n) must be below 1");
  }
  MajorantParams params;
  params.c1 = kProhorovConstant;
  params.c2 = 2.0 / (1.0 - eta);
  params.phi1 = [](std::size_t kk) {
    const double kd = static_cast<double>(kk);
    return std::exp(-0.5 * (kd - 1.0) * std::log(2.0) - std::lgamma(0.5 * kd));
  };
  params.window = [envelope](std::size_t kk, double nn) { return prohorov_window(kk, nn, envelope); };
  return params;
}

double b2_tail_sum(const Majorant& majorant, std::size_t first, std::size_t last,
                   const std::function<double(std::size_t k, double n)>& lower, double n) {
  if (first == 0 || first > last) {
    throw InvalidArgument("b2_tail_sum: need 1 <= first <= last");
  }
  double sum = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    sum += majorant(k, lower(k, n));
  }
  return sum;
}

}  // namespace ntgof
