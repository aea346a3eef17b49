#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "expfam/error.hpp"
#include "expfam/family_catalog.hpp"
#include "expfam/numeric/newton.hpp"
#include "expfam/numeric/quadrature.hpp"
#include "expfam/numeric/summation.hpp"

namespace expfam::numeric {

/// The integration range matching a continuous support.
inline Interval support_interval(const ClosedFormFamily& family) {
  switch (family.support().kind) {
    case SupportKind::RealLine: return Interval::real_line();
    case SupportKind::PositiveReals: return Interval::positive();
    default: break;
  }
  throw Error(ErrorKind::Unsupported, std::string(family.name()) + " has a discrete support");
}

namespace detail {

inline double log_term(const ClosedFormFamily& family, const Eigen::VectorXd& eta, double x) {
  return log_base(family, x) + eta.dot(canonical_stats(family, x));
}

// Sums a countable support term by term. Once the term ratio r drops below
// one, the remaining tail of a log-concave sequence is bounded by T_N r / (1 - r);
// summation stops when that bound is below abs_tol / 10 relative to the sum.
inline double countable_log_sum(const ClosedFormFamily& family, const Eigen::VectorXd& eta, const Tolerance& tol) {
  constexpr long kMaxTerms = 100'000'000;
  const double log_budget = std::log(std::max(tol.abs_tol, std::numeric_limits<double>::min()) / 10.0);
  std::vector<double> logs;
  double running = log_term(family, eta, 0.0);
  logs.push_back(running);
  for (long x = 1; x < kMaxTerms; ++x) {
    const double current = log_term(family, eta, static_cast<double>(x));
    if (!std::isfinite(current)) throw Error(ErrorKind::NonFinite, "partition sum term is not finite");
    logs.push_back(current);
    running = log_sum_exp({running, current});
    const double log_ratio = current - logs[logs.size() - 2];
    if (log_ratio < 0.0) {
      const double log_tail = current + log_ratio - std::log1p(-std::exp(log_ratio));
      if (log_tail < log_budget + running) return log_sum_exp(logs);
    }
  }
  throw Error(ErrorKind::NonFinite, "partition sum did not settle; eta is likely outside the canonical domain");
}

}  // namespace detail

/// log z(eta) computed without the closed forms: a truncated sum over
/// discrete supports, adaptive quadrature over continuous ones. Divergence
/// (eta outside the canonical domain) surfaces as NonFinite.
inline double numeric_log_partition(const ClosedFormFamily& family, const CanonicalParams& params,
                                    const Tolerance& tol = {}) {
  const Eigen::VectorXd& eta = params.eta;
  if (eta.size() != family.dimension())
    throw Error(ErrorKind::DimensionMismatch, "numeric_log_partition: wrong canonical dimension");
  switch (family.support().kind) {
    case SupportKind::FiniteRange: {
      std::vector<double> logs;
      for (int x = 0; x <= family.support().upper; ++x) logs.push_back(detail::log_term(family, eta, x));
      const double value = log_sum_exp(logs);
      if (!std::isfinite(value)) throw Error(ErrorKind::NonFinite, "finite partition sum is not finite");
      return value;
    }
    case SupportKind::Countable: return detail::countable_log_sum(family, eta, tol);
    default: break;
  }
  auto log_integrand = [&](double x) {
    if (!family.support().contains(x)) return -std::numeric_limits<double>::infinity();
    return detail::log_term(family, eta, x);
  };
  const LogQuadratureResult r = integrate_log(log_integrand, support_interval(family));
  if (!r.converged || !std::isfinite(r.log_value)) {
    std::ostringstream msg;
    msg << family.name() << ": partition integral did not converge (estimate " << r.log_value
        << "); eta is likely outside the canonical domain";
    throw Error(ErrorKind::NonFinite, msg.str());
  }
  return r.log_value;
}

}  // namespace expfam::numeric
