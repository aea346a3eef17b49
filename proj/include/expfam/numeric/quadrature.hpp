#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "expfam/error.hpp"
#include "expfam/numeric/summation.hpp"

namespace expfam::numeric {

/// Closed or open interval with possibly infinite endpoints.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool interior(double x) const { return x > lo && x < hi; }
  static Interval real_line() { return {}; }
  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity()}; }
};

struct QuadratureOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-13;
  int max_panels = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes kKronrodNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel kronrod_panel(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over the finite [a, b].
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol * |I|).
template <class F>
QuadratureResult integrate_finite(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  QuadratureResult result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  std::priority_queue<detail::Panel> panels;
  panels.push(detail::kronrod_panel(f, a, b));
  double value = panels.top().value;
  double error = panels.top().error;
  int count = 1;
  while (true) {
    if (!std::isfinite(value) || !std::isfinite(error)) break;
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
      result.converged = true;
      break;
    }
    if (count >= opts.max_panels) break;
    const detail::Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // panel no longer splittable
    panels.pop();
    const detail::Panel left = detail::kronrod_panel(f, worst.a, mid);
    const detail::Panel right = detail::kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Re-sum to drop the drift accumulated by the incremental updates.
  std::vector<double> values;
  std::vector<double> errors;
  values.reserve(panels.size());
  errors.reserve(panels.size());
  while (!panels.empty()) {
    values.push_back(panels.top().value);
    errors.push_back(panels.top().error);
    panels.pop();
  }
  result.value = ordered_sum(std::move(values));
  result.error = ordered_sum(std::move(errors));
  result.panels = count;
  if (!std::isfinite(result.value)) result.converged = false;
  return result;
}

/// Integral of f over [origin, origin + direction * inf) via x = origin + direction * scale * u / (1 - u).
template <class F>
QuadratureResult integrate_half_line(F&& f, double origin, double direction, double scale,
                                     const QuadratureOptions& opts = {}) {
  auto mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    const double x = origin + direction * scale * u / one_minus;
    if (!std::isfinite(x)) return 0.0;
    const double value = f(x);
    if (value == 0.0) return 0.0;
    return value * scale / (one_minus * one_minus);
  };
  return integrate_finite(mapped, 0.0, 1.0, opts);
}

/// Where an integrand exp(log_f) keeps its mass: the located peak and a length
/// scale on either side of it. Used to split and map the integration range.
struct MassLayout {
  double center = 0.0;
  double peak = -std::numeric_limits<double>::infinity();
  double left_scale = 1.0;
  double right_scale = 1.0;
};

namespace detail {

inline std::vector<double> probe_points(const Interval& range) {
  std::vector<double> probes;
  const bool lo_inf = std::isinf(range.lo);
  const bool hi_inf = std::isinf(range.hi);
  if (!lo_inf && !hi_inf) {
    constexpr int kCount = 257;
    for (int i = 1; i < kCount; ++i) probes.push_back(range.lo + (range.hi - range.lo) * i / kCount);
    return probes;
  }
  std::vector<double> offsets;
  for (int k = -32; k <= 40; ++k) offsets.push_back(std::pow(10.0, 0.25 * k));
  if (lo_inf && hi_inf) {
    for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) probes.push_back(-*it);
    probes.push_back(0.0);
    for (double o : offsets) probes.push_back(o);
  } else if (!lo_inf) {
    for (double o : offsets) probes.push_back(range.lo + o);
  } else {
    for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) probes.push_back(range.hi - *it);
  }
  return probes;
}

template <class LogF>
double safe_log_eval(LogF& log_f, double x) {
  // +inf marks an integrable pole; it cannot anchor the layout.
  const double v = log_f(x);
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
  return v;
}

}  // namespace detail

/// Locates the peak of exp(log_f) over range by probing a geometric grid and
/// refining the best bracket with golden-section search.
template <class LogF>
MassLayout locate_mass(LogF&& log_f, const Interval& range) {
  const std::vector<double> probes = detail::probe_points(range);
  std::vector<double> values;
  values.reserve(probes.size());
  for (double x : probes) values.push_back(detail::safe_log_eval(log_f, x));
  const auto best = std::max_element(values.begin(), values.end());
  MassLayout layout;
  if (!std::isfinite(*best)) {
    layout.peak = *best;
    layout.center = probes[static_cast<std::size_t>(best - values.begin())];
    return layout;
  }
  const std::size_t idx = static_cast<std::size_t>(best - values.begin());
  double a = idx == 0 ? (std::isinf(range.lo) ? probes[0] - 1.0 : range.lo) : probes[idx - 1];
  double b = idx + 1 == probes.size() ? (std::isinf(range.hi) ? probes.back() + 1.0 : range.hi)
                                      : probes[idx + 1];
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = detail::safe_log_eval(log_f, c);
  double fd = detail::safe_log_eval(log_f, d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = detail::safe_log_eval(log_f, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = detail::safe_log_eval(log_f, d);
    }
  }
  layout.center = probes[idx];
  layout.peak = *best;
  const double refined = 0.5 * (a + b);
  const double refined_value = detail::safe_log_eval(log_f, refined);
  if (refined_value > layout.peak && range.interior(refined)) {
    layout.center = refined;
    layout.peak = refined_value;
  }
  // Typical distance of the mass from the peak: the offset delta maximizing
  // log_f(center + delta) + log(delta), i.e. the heaviest dyadic shell.
  auto scale_towards = [&](double direction, double limit) {
    double delta = 1e-10 * std::max(1.0, std::abs(layout.center));
    double best_delta = 1.0;
    double best_shell = -std::numeric_limits<double>::infinity();
    for (; delta < 1e15; delta *= 2.0) {
      const double x = layout.center + direction * delta;
      if ((direction > 0 && x >= limit) || (direction < 0 && x <= limit)) break;
      const double shell = detail::safe_log_eval(log_f, x) + std::log(delta);
      if (shell > best_shell) {
        best_shell = shell;
        best_delta = delta;
      } else if (shell < best_shell - 40.0) {
        break;
      }
    }
    return best_delta;
  };
  layout.left_scale = scale_towards(-1.0, range.lo);
  layout.right_scale = scale_towards(1.0, range.hi);
  return layout;
}

/// Integral of g(x) * exp(log_w(x) - shift) over range, split at the mass
/// center of log_w and mapped onto finite panels where the range is unbounded.
template <class F>
QuadratureResult integrate_with_layout(F&& f, const Interval& range, const MassLayout& layout,
                                       const QuadratureOptions& opts = {}) {
  QuadratureResult total;
  total.converged = true;
  auto accumulate = [&](const QuadratureResult& piece) {
    total.value += piece.value;
    total.error += piece.error;
    total.panels += piece.panels;
    total.converged = total.converged && piece.converged;
  };
  const double c = std::clamp(layout.center, range.lo, range.hi);
  if (std::isinf(range.lo)) {
    accumulate(integrate_half_line(f, c, -1.0, layout.left_scale, opts));
  } else {
    accumulate(integrate_finite(f, range.lo, c, opts));
  }
  if (std::isinf(range.hi)) {
    accumulate(integrate_half_line(f, c, 1.0, layout.right_scale, opts));
  } else {
    accumulate(integrate_finite(f, c, range.hi, opts));
  }
  return total;
}

struct LogQuadratureResult {
  double log_value = 0.0;
  double rel_error = 0.0;
  bool converged = false;
};

/// log of the integral of exp(log_f(x)) over range, evaluated relative to the
/// located peak so that large or tiny normalizers do not overflow.
template <class LogF>
LogQuadratureResult integrate_log(LogF&& log_f, const Interval& range, const QuadratureOptions& opts = {}) {
  const MassLayout layout = locate_mass(log_f, range);
  LogQuadratureResult out;
  if (std::isinf(layout.peak) && layout.peak < 0) {
    out.log_value = layout.peak;
    out.converged = true;
    return out;
  }
  if (!std::isfinite(layout.peak)) {
    out.log_value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  auto shifted = [&](double x) {
    const double v = log_f(x);
    if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
    if (v == std::numeric_limits<double>::infinity()) return 0.0;  // node landed exactly on an integrable pole
    return std::exp(v - layout.peak);
  };
  const QuadratureResult r = integrate_with_layout(shifted, range, layout, opts);
  out.log_value = layout.peak + std::log(r.value);
  out.rel_error = r.value > 0 ? r.error / r.value : std::numeric_limits<double>::infinity();
  out.converged = r.converged && std::isfinite(out.log_value);
  return out;
}

/// Expectation of g under the density exp(log_p) over range.
template <class LogP, class G>
QuadratureResult integrate_expectation(LogP&& log_p, G&& g, const Interval& range,
                                       const QuadratureOptions& opts = {}) {
  const MassLayout layout = locate_mass(log_p, range);
  auto integrand = [&](double x) {
    const double lp = log_p(x);
    if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(lp) * g(x);
  };
  return integrate_with_layout(integrand, range, layout, opts);
}

}  // namespace expfam::numeric
