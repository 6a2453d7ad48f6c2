#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "hkfold/detail/double_double.hpp"
#include "hkfold/errors.hpp"

namespace hkfold {

namespace airy_detail {

inline constexpr double kSwitchover = 9.0;
inline constexpr double kMaxArgument = 100.0;

// Ai(x) = c1 f(x) - c2 g(x), both series in x^3. The partial sums cancel
// heavily for |x| of a few units, hence the double-double accumulation.
inline double maclaurin(double x) {
  using detail::DoubleDouble;
  const DoubleDouble c1(0.3550280538878172, 2.05233632436212e-17);
  const DoubleDouble c2(0.2588194037928068, -2.522243111610832e-17);

  const DoubleDouble x3 = detail::two_prod(x, x) * x;
  DoubleDouble f_term(1.0);
  DoubleDouble g_term(x);
  DoubleDouble f_sum = f_term;
  DoubleDouble g_sum = g_term;
  for (int k = 1; k < 200; ++k) {
    const double k3 = 3.0 * k;
    f_term = (f_term * x3) / (k3 * (k3 - 1.0));
    g_term = (g_term * x3) / (k3 * (k3 + 1.0));
    f_sum = f_sum + f_term;
    g_sum = g_sum + g_term;
    if (abs_hi(f_term) < 1e-34 * (1.0 + abs_hi(f_sum)) &&
        abs_hi(g_term) < 1e-34 * (1.0 + abs_hi(g_sum))) {
      break;
    }
  }
  return (c1 * f_sum - c2 * g_sum).to_double();
}

// u_k of the standard large-argument expansion: u_0 = 1,
// u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k).
inline double u_next(double u_prev, int k) {
  const double kk = k;
  return u_prev * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216.0 * kk);
}

inline double asymptotic_positive(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  double u = 1.0;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    u = u_next(u, k);
    const double next = (k % 2 ? -u : u) / std::pow(zeta, k);
    if (std::fabs(next) >= std::fabs(term)) break;
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi) * std::sqrt(std::sqrt(x))) * sum;
}

inline double asymptotic_negative(double x) {
  const double z = -x;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  // Even-index terms multiply sin(zeta + pi/4), odd-index terms cos(zeta + pi/4).
  double even = 1.0;
  double odd = 0.0;
  double u = 1.0;
  double last = 1.0;
  for (int k = 1; k < 60; ++k) {
    u = u_next(u, k);
    const double mag = u / std::pow(zeta, k);
    if (mag >= last) break;
    last = mag;
    const int j = k / 2;
    const double sign = (j % 2) ? -1.0 : 1.0;
    if (k % 2 == 0) {
      even += sign * mag;
    } else {
      odd += sign * mag;
    }
    if (mag < 1e-17) break;
  }
  const double theta = zeta + std::numbers::pi / 4.0;
  return (std::sin(theta) * even - std::cos(theta) * odd) /
         (std::sqrt(std::numbers::pi) * std::sqrt(std::sqrt(z)));
}

}  // namespace airy_detail

/// Airy function Ai(x) for real |x| <= 100.
///
/// Maclaurin series (double-double accumulation) for |x| <= 9, large-argument
/// expansions beyond. Absolute error <= 1e-12 for |x| <= 10, relative error
/// (to the oscillation envelope for x < 0) <= 1e-10 up to |x| = 30.
inline double airy_ai(double x) {
  if (!std::isfinite(x) || std::fabs(x) > airy_detail::kMaxArgument) {
    throw RangeError("airy_ai: argument " + std::to_string(x) + " outside [-100, 100]");
  }
  if (std::fabs(x) <= airy_detail::kSwitchover) return airy_detail::maclaurin(x);
  return x > 0 ? airy_detail::asymptotic_positive(x) : airy_detail::asymptotic_negative(x);
}

/// Gamma(3/4), used by the deep-tail prefactor.
inline constexpr double gamma_three_quarters() { return 1.2254167024651776451290983034; }

}  // namespace hkfold
