#pragma once

#include <cmath>
#include <numbers>
#include <sstream>

#include "expfam/error.hpp"

namespace expfam::numeric {

namespace detail {

inline void require_positive(double x, const char* name) {
  if (!(x > 0.0) || std::isinf(x)) {
    std::ostringstream msg;
    msg << name << " requires a finite argument > 0, got " << x;
    throw Error(ErrorKind::DomainError, msg.str());
  }
}

// Arguments below this are shifted upward by the recurrences before the
// asymptotic series is applied.
inline constexpr double kAsymptoticThreshold = 8.0;

}  // namespace detail

/// log Gamma(x) for x > 0.
inline double log_gamma_fn(double x) {
  detail::require_positive(x, "log_gamma_fn");
  if (x <= 19.0 && std::floor(x) == x) {
    // (x-1)! is exactly representable here, so the result is correctly rounded.
    double factorial = 1.0;
    for (double k = 2.0; k < x; k += 1.0) factorial *= k;
    return std::log(factorial);
  }
  // log Gamma(x) = log Gamma(x + k) - log(x (x+1) ... (x+k-1))
  double shift_product = 1.0;
  double z = x;
  while (z < detail::kAsymptoticThreshold) {
    shift_product *= z;
    z += 1.0;
  }
  // Stirling series with Bernoulli coefficients B_2k / (2k (2k-1)).
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  const double series =
      inv *
      (1.0 / 12.0 +
       inv2 * (-1.0 / 360.0 +
               inv2 * (1.0 / 1260.0 +
                       inv2 * (-1.0 / 1680.0 +
                               inv2 * (1.0 / 1188.0 +
                                       inv2 * (-691.0 / 360360.0 +
                                               inv2 * (1.0 / 156.0 + inv2 * (-3617.0 / 122400.0))))))));
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const double stirling = (z - 0.5) * std::log(z) - z + half_log_two_pi + series;
  return stirling - std::log(shift_product);
}

/// Digamma psi(x) = d/dx log Gamma(x) for x > 0.
inline double digamma_fn(double x) {
  detail::require_positive(x, "digamma_fn");
  double correction = 0.0;
  double z = x;
  while (z < detail::kAsymptoticThreshold) {
    correction += 1.0 / z;
    z += 1.0;
  }
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  const double series =
      inv2 *
      (1.0 / 12.0 -
       inv2 * (1.0 / 120.0 -
               inv2 * (1.0 / 252.0 -
                       inv2 * (1.0 / 240.0 -
                               inv2 * (1.0 / 132.0 -
                                       inv2 * (691.0 / 32760.0 -
                                               inv2 * (1.0 / 12.0 - inv2 * (3617.0 / 8160.0))))))));
  return std::log(z) - 0.5 * inv - series - correction;
}

/// log of the binomial coefficient C(n, k) through log-gamma.
inline double log_binomial_coefficient(double n, double k) {
  if (k < 0.0 || k > n) throw Error(ErrorKind::DomainError, "log_binomial_coefficient requires 0 <= k <= n");
  return log_gamma_fn(n + 1.0) - log_gamma_fn(k + 1.0) - log_gamma_fn(n - k + 1.0);
}

}  // namespace expfam::numeric
