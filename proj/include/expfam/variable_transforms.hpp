#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "expfam/entropy_metrics.hpp"
#include "expfam/error.hpp"
#include "expfam/family_catalog.hpp"
#include "expfam/numeric/partition.hpp"
#include "expfam/numeric/quadrature.hpp"

namespace expfam {

/// Strictly monotone change of variables y = forward(x) with inverse x(y) and
/// |dx/dy| = d_inverse(y).
struct MonotoneMap {
  std::string name;
  std::function<double(double)> forward;
  std::function<double(double)> inverse;
  std::function<double(double)> d_inverse;
  numeric::Interval domain;  // x
  numeric::Interval range;   // y
  bool increasing = true;

  static MonotoneMap identity() {
    return {"identity", [](double x) { return x; }, [](double y) { return y; }, [](double) { return 1.0; },
            numeric::Interval::real_line(), numeric::Interval::real_line(), true};
  }

  /// y = a x + b with a != 0.
  static MonotoneMap affine(double a, double b = 0.0) {
    if (!(a != 0.0) || !std::isfinite(a) || !std::isfinite(b))
      throw Error(ErrorKind::DomainError, "affine map needs a finite, non-zero slope");
    std::ostringstream name;
    name << "affine(" << a << "," << b << ")";
    return {name.str(), [a, b](double x) { return a * x + b; }, [a, b](double y) { return (y - b) / a; },
            [a](double) { return 1.0 / std::abs(a); }, numeric::Interval::real_line(),
            numeric::Interval::real_line(), a > 0.0};
  }

  /// y = sqrt(x) on x > 0.
  static MonotoneMap sqrt() {
    return {"sqrt", [](double x) { return std::sqrt(x); }, [](double y) { return y * y; },
            [](double y) { return 2.0 * y; }, numeric::Interval::positive(), numeric::Interval::positive(), true};
  }

  /// y = x^3.
  static MonotoneMap cube() {
    return {"cube", [](double x) { return x * x * x; }, [](double y) { return std::cbrt(y); },
            [](double y) {
              const double c = std::cbrt(y);
              return 1.0 / (3.0 * c * c);
            },
            numeric::Interval::real_line(), numeric::Interval::real_line(), true};
  }

  /// y = log x on x > 0.
  static MonotoneMap log() {
    return {"log", [](double x) { return std::log(x); }, [](double y) { return std::exp(y); },
            [](double y) { return std::exp(y); }, numeric::Interval::positive(), numeric::Interval::real_line(),
            true};
  }

  bool in_domain(double x) const { return x > domain.lo && x < domain.hi; }
  bool in_range(double y) const { return y > range.lo && y < range.hi; }
};

/// Largest |forward(inverse(y)) - y| over ys, relative to max(1, |y|).
inline double roundtrip_error(const MonotoneMap& map, const std::vector<double>& ys) {
  double worst = 0.0;
  for (double y : ys) worst = std::max(worst, std::abs(map.forward(map.inverse(y)) - y) / std::max(1.0, std::abs(y)));
  return worst;
}

/// Relabels the support points by the map; probabilities stay with their points.
inline FiniteDistribution transform_discrete(const FiniteDistribution& dist, const MonotoneMap& map) {
  std::vector<double> points;
  points.reserve(dist.size());
  for (double x : dist.points()) {
    if (!map.in_domain(x)) {
      std::ostringstream msg;
      msg << "support point " << x << " outside the domain of " << map.name;
      throw Error(ErrorKind::DomainError, msg.str());
    }
    points.push_back(map.forward(x));
  }
  std::vector<double> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorKind::NonInjectiveOnSupport, map.name + " maps two support points to the same value");
  return {std::move(points), dist.probs()};
}

/// log p_y(y) = log p_x(x(y)) + log |dx/dy|.
template <class LogPdf>
double transform_density(LogPdf&& log_pdf, const MonotoneMap& map, double y) {
  if (!map.in_range(y)) {
    std::ostringstream msg;
    msg << "y = " << y << " outside the range of " << map.name;
    throw Error(ErrorKind::DomainError, msg.str());
  }
  return log_pdf(map.inverse(y)) + std::log(map.d_inverse(y));
}

namespace detail {

inline void require_continuous(const ClosedFormFamily& family) {
  if (family.support().discrete())
    throw Error(ErrorKind::Unsupported, std::string(family.name()) + " is discrete; continuous family required");
}

// Quantile of a continuous catalog family by bisection on a quadrature CDF.
inline double family_quantile(const ClosedFormFamily& family, const CanonicalParams& params, double prob) {
  const numeric::Interval support = numeric::support_interval(family);
  auto log_p = [&](double x) {
    return family.support().contains(x) ? log_pdmf(family, params, x) : -std::numeric_limits<double>::infinity();
  };
  auto pdf = [&](double x) { return family.support().contains(x) ? std::exp(log_pdmf(family, params, x)) : 0.0; };
  const numeric::MassLayout layout = numeric::locate_mass(log_p, support);
  const numeric::QuadratureOptions opts{0.0, 1e-12, 4000};

  auto lower_tail = [&](double x) {
    if (std::isinf(support.lo)) return numeric::integrate_half_line(pdf, x, -1.0, layout.left_scale, opts).value;
    return numeric::integrate_finite(pdf, support.lo, x, opts).value;
  };
  auto upper_tail = [&](double x) { return numeric::integrate_half_line(pdf, x, 1.0, layout.right_scale, opts).value; };
  // Compare in whichever tail is smaller to keep relative accuracy.
  auto below = [&](double x) { return x <= layout.center ? lower_tail(x) < prob : 1.0 - upper_tail(x) < prob; };

  double lo = layout.center, hi = layout.center;
  if (below(layout.center)) {
    for (double step = layout.right_scale; below(hi); step *= 2.0) {
      lo = hi;
      hi += step;
    }
  } else {
    for (double step = layout.left_scale; !below(lo); step *= 2.0) {
      hi = lo;
      lo = std::isinf(support.lo) ? lo - step : support.lo + 0.25 * (lo - support.lo);
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

struct ClosureReport {
  bool closes = false;
  double residual = 0.0;         // largest absolute least-squares residual on the grid
  Eigen::VectorXd coefficients;  // [constant, per-statistic weights]
  std::vector<double> grid;      // y values used
};

inline constexpr double kClosureTolerance = 1e-8;
inline constexpr int kClosureGridSize = 64;

/// Whether the log-Jacobian log |dx/dy| is affine in the transformed canonical
/// statistics t(x(y)), so that the transformed family stays exponential. Fit by
/// least squares on 64 points over the central 99% of the distribution of y.
inline ClosureReport check_efu_closure(const MonotoneMap& map, const ClosedFormFamily& family,
                                       const CanonicalParams& params) {
  detail::require_continuous(family);
  require_canonical(family, params);
  double y_lo = map.forward(detail::family_quantile(family, params, 0.005));
  double y_hi = map.forward(detail::family_quantile(family, params, 0.995));
  if (y_lo > y_hi) std::swap(y_lo, y_hi);

  ClosureReport r;
  const bool log_spaced = y_lo > 0.0;
  for (int i = 0; i < kClosureGridSize; ++i) {
    const double s = static_cast<double>(i) / (kClosureGridSize - 1);
    r.grid.push_back(log_spaced ? std::exp(std::log(y_lo) + s * (std::log(y_hi) - std::log(y_lo)))
                                : y_lo + s * (y_hi - y_lo));
  }
  const Eigen::Index d = family.dimension();
  Eigen::MatrixXd design(kClosureGridSize, d + 1);
  Eigen::VectorXd response(kClosureGridSize);
  for (int i = 0; i < kClosureGridSize; ++i) {
    const double y = r.grid[i];
    design(i, 0) = 1.0;
    design.row(i).tail(d) = canonical_stats(family, map.inverse(y)).transpose();
    response(i) = std::log(map.d_inverse(y));
  }
  r.coefficients = design.colPivHouseholderQr().solve(response);
  r.residual = (design * r.coefficients - response).cwiseAbs().maxCoeff();
  r.closes = r.residual < kClosureTolerance;
  return r;
}

struct EntropyShiftReport {
  double h_before = 0.0;
  double h_after = 0.0;
  double delta = 0.0;
};

namespace detail {

template <class LogPdf>
double differential_entropy(LogPdf&& log_pdf, const numeric::Interval& range) {
  const numeric::QuadratureResult r =
      numeric::integrate_expectation(log_pdf, [&](double x) { return -log_pdf(x); }, range);
  if (!r.converged || !std::isfinite(r.value)) {
    std::ostringstream msg;
    msg << "entropy quadrature did not converge (estimate " << r.value << ", error " << r.error << ")";
    throw Error(ErrorKind::QuadratureFailure, msg.str());
  }
  return r.value;
}

}  // namespace detail

/// Differential entropies of x and y = map(x), both by quadrature.
inline EntropyShiftReport demo_h_noninvariance(const ClosedFormFamily& family, const CanonicalParams& params,
                                               const MonotoneMap& map) {
  detail::require_continuous(family);
  require_canonical(family, params);
  const numeric::Interval support = numeric::support_interval(family);
  if (support.lo < map.domain.lo || support.hi > map.domain.hi)
    throw Error(ErrorKind::DomainError, std::string(family.name()) + " support exceeds the domain of " + map.name);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  auto log_px = [&](double x) { return family.support().contains(x) ? log_pdmf(family, params, x) : kNegInf; };
  auto log_py = [&](double y) {
    if (!map.in_range(y)) return kNegInf;
    const double x = map.inverse(y);
    if (!family.support().contains(x)) return kNegInf;
    return log_pdmf(family, params, x) + std::log(map.d_inverse(y));
  };
  EntropyShiftReport r;
  r.h_before = detail::differential_entropy(log_px, support);
  r.h_after = detail::differential_entropy(log_py, map.range);
  r.delta = r.h_after - r.h_before;
  return r;
}

struct GInvarianceReport {
  double g_original = 0.0;
  double g_permuted = 0.0;
  std::optional<double> g_merged;
};

namespace detail {

inline FiniteDistribution merge_cells(const FiniteDistribution& dist, const std::vector<std::size_t>& cell_of) {
  const std::size_t cells = *std::max_element(cell_of.begin(), cell_of.end()) + 1;
  std::vector<std::vector<double>> groups(cells);
  for (std::size_t i = 0; i < cell_of.size(); ++i) groups[cell_of[i]].push_back(dist[i]);
  std::vector<double> probs;
  probs.reserve(cells);
  for (auto& g : groups) probs.push_back(numeric::ordered_sum(std::move(g)));
  return FiniteDistribution::over_indices(std::move(probs));
}

}  // namespace detail

/// G(Q, P) under a simultaneous relabeling of the support (must not change at
/// all) and, optionally, under a merge map sending index i to cell merge[i]
/// (must not decrease).
inline GInvarianceReport demo_g_invariance(const FiniteDistribution& q, const FiniteDistribution& p,
                                           const std::vector<std::size_t>& permutation,
                                           const std::optional<std::vector<std::size_t>>& merge = std::nullopt) {
  if (q.size() != p.size()) throw Error(ErrorKind::SupportMismatch, "q and p differ in length");
  std::vector<std::size_t> check = permutation;
  std::sort(check.begin(), check.end());
  bool bijection = check.size() == q.size();
  for (std::size_t i = 0; bijection && i < check.size(); ++i) bijection = check[i] == i;
  if (!bijection) throw Error(ErrorKind::DomainError, "permutation is not a bijection of the support indices");

  std::vector<double> q_perm(q.size()), p_perm(p.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q_perm[i] = q[permutation[i]];
    p_perm[i] = p[permutation[i]];
  }
  GInvarianceReport r;
  r.g_original = relative_entropy_g(q, p);
  r.g_permuted = relative_entropy_g(FiniteDistribution::over_indices(q_perm), FiniteDistribution::over_indices(p_perm));
  std::vector<double> witness = q.probs();
  witness.insert(witness.end(), p.probs().begin(), p.probs().end());
  if (r.g_permuted != r.g_original) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "G changed under relabeling: " << r.g_original << " -> " << r.g_permuted;
    throw InvariantViolation("g-permutation", witness, msg.str());
  }
  if (merge) {
    if (merge->size() != q.size()) throw Error(ErrorKind::SupportMismatch, "merge map length differs from the support");
    r.g_merged = relative_entropy_g(detail::merge_cells(q, *merge), detail::merge_cells(p, *merge));
    if (!(*r.g_merged >= r.g_original - 1e-12)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "G decreased under merging: " << r.g_original << " -> " << *r.g_merged;
      throw InvariantViolation("data-processing", witness, msg.str());
    }
  }
  return r;
}

}  // namespace expfam
