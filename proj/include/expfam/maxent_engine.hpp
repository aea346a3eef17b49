#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "expfam/entropy_metrics.hpp"
#include "expfam/error.hpp"
#include "expfam/numeric/newton.hpp"
#include "expfam/numeric/summation.hpp"

namespace expfam {

/// Lower bound kept on oracle and perturbed probabilities.
inline constexpr double kProbabilityFloor = 1e-9;

/// Finite-support moment problem: base weights h (as log-weights), statistics
/// t(x_i) as the rows of a K x d matrix, and target moments mu_t.
class MomentProblem {
 public:
  MomentProblem(std::vector<double> points, Eigen::VectorXd log_base_weights, Eigen::MatrixXd stats,
                Eigen::VectorXd target)
      : points_(std::move(points)),
        log_weights_(std::move(log_base_weights)),
        stats_(std::move(stats)),
        target_(std::move(target)) {
    validate();
  }

  /// Support points 0..K-1.
  MomentProblem(Eigen::VectorXd log_base_weights, Eigen::MatrixXd stats, Eigen::VectorXd target)
      : points_(index_points(log_base_weights.size())),
        log_weights_(std::move(log_base_weights)),
        stats_(std::move(stats)),
        target_(std::move(target)) {
    validate();
  }

  Eigen::Index size() const { return stats_.rows(); }
  Eigen::Index dimension() const { return stats_.cols(); }
  const std::vector<double>& points() const { return points_; }
  const Eigen::VectorXd& log_base_weights() const { return log_weights_; }
  const Eigen::MatrixXd& stats() const { return stats_; }
  const Eigen::VectorXd& target() const { return target_; }

  bool uniform_base() const {
    return (log_weights_.array() == log_weights_(0)).all();
  }

  /// The same problem with the support reordered: entry i of the result is entry perm[i] of this one.
  MomentProblem permuted(const std::vector<Eigen::Index>& perm) const {
    if (static_cast<Eigen::Index>(perm.size()) != size())
      throw Error(ErrorKind::DimensionMismatch, "permutation length differs from the support size");
    std::vector<double> pts(perm.size());
    Eigen::VectorXd lw(size());
    Eigen::MatrixXd st(size(), dimension());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      pts[i] = points_.at(perm[i]);
      lw(i) = log_weights_(perm[i]);
      st.row(i) = stats_.row(perm[i]);
    }
    return {std::move(pts), std::move(lw), std::move(st), target_};
  }

 private:
  static std::vector<double> index_points(Eigen::Index k) {
    std::vector<double> pts(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = static_cast<double>(i);
    return pts;
  }

  void validate() const {
    const Eigen::Index k = stats_.rows();
    const Eigen::Index d = stats_.cols();
    if (k < 2) throw Error(ErrorKind::DimensionMismatch, "moment problem needs at least two support points");
    if (d < 1 || d > k - 1) {
      std::ostringstream msg;
      msg << "moment problem needs 1 <= d <= K-1 (K=" << k << ", d=" << d << ")";
      throw Error(ErrorKind::DimensionMismatch, msg.str());
    }
    if (log_weights_.size() != k || static_cast<Eigen::Index>(points_.size()) != k)
      throw Error(ErrorKind::DimensionMismatch, "base weights, support and stats rows differ in length");
    if (target_.size() != d) throw Error(ErrorKind::DimensionMismatch, "target length differs from the stats width");
    if (!log_weights_.allFinite()) throw Error(ErrorKind::DomainError, "base log-weights must be finite");
    if (!stats_.allFinite()) throw Error(ErrorKind::DomainError, "statistics must be finite");
    if (!target_.allFinite()) throw Error(ErrorKind::DomainError, "target moments must be finite");
    std::vector<double> sorted = points_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorKind::DomainError, "support points must be distinct");

    const Eigen::MatrixXd centered = stats_.rowwise() - stats_.colwise().mean();
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(centered).singularValues();
    if (!(sv(0) > 0.0) || sv(d - 1) < 1e-10 * sv(0)) {
      std::ostringstream msg;
      msg << "statistics are affinely dependent (singular values " << sv.transpose() << ")";
      throw Error(ErrorKind::DegenerateStatistics, msg.str());
    }
  }

  std::vector<double> points_;
  Eigen::VectorXd log_weights_;
  Eigen::MatrixXd stats_;
  Eigen::VectorXd target_;
};

namespace detail {

inline std::vector<double> tilt_logits(const Eigen::VectorXd& log_weights, const Eigen::MatrixXd& stats,
                                       const Eigen::VectorXd& eta) {
  if (log_weights.size() != stats.rows() || eta.size() != stats.cols())
    throw Error(ErrorKind::DimensionMismatch, "tilt: base weights, stats and eta dimensions disagree");
  std::vector<double> logits(static_cast<std::size_t>(stats.rows()));
  for (Eigen::Index i = 0; i < stats.rows(); ++i) logits[i] = log_weights(i) + stats.row(i).dot(eta);
  return logits;
}

// Column-wise expectation of stats under probs, with order-free sums.
inline Eigen::VectorXd expectation(const std::vector<double>& probs, const Eigen::MatrixXd& stats) {
  Eigen::VectorXd m(stats.cols());
  std::vector<double> terms(probs.size());
  for (Eigen::Index j = 0; j < stats.cols(); ++j) {
    for (std::size_t i = 0; i < probs.size(); ++i) terms[i] = probs[i] * stats(i, j);
    m(j) = numeric::ordered_sum(terms);
  }
  return m;
}

inline Eigen::MatrixXd covariance(const std::vector<double>& probs, const Eigen::MatrixXd& stats) {
  const Eigen::VectorXd m = expectation(probs, stats);
  const Eigen::Index d = stats.cols();
  Eigen::MatrixXd c(d, d);
  std::vector<double> terms(probs.size());
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      for (std::size_t i = 0; i < probs.size(); ++i)
        terms[i] = probs[i] * (stats(i, a) - m(a)) * (stats(i, b) - m(b));
      c(a, b) = c(b, a) = numeric::ordered_sum(terms);
    }
  }
  return c;
}

inline std::vector<double> normalized_exp(const std::vector<double>& logits, double log_z) {
  std::vector<double> p(logits.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(logits[i] - log_z);
  const double total = numeric::ordered_sum(p);
  for (double& v : p) v /= total;
  return p;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

/// log z(eta) = log sum_i h_i exp(<eta, t_i>).
inline double tilt_log_partition(const Eigen::VectorXd& log_weights, const Eigen::MatrixXd& stats,
                                 const Eigen::VectorXd& eta) {
  return numeric::log_sum_exp(detail::tilt_logits(log_weights, stats, eta));
}

/// Exponential tilt p_i proportional to h_i exp(<eta, t_i>), over the given support points.
inline FiniteDistribution tilt(const Eigen::VectorXd& log_weights, const Eigen::MatrixXd& stats,
                               const Eigen::VectorXd& eta, std::vector<double> points) {
  const std::vector<double> logits = detail::tilt_logits(log_weights, stats, eta);
  if (static_cast<Eigen::Index>(points.size()) != stats.rows())
    throw Error(ErrorKind::DimensionMismatch, "tilt: support length differs from the stats rows");
  return {std::move(points), detail::normalized_exp(logits, numeric::log_sum_exp(logits))};
}

inline FiniteDistribution tilt(const Eigen::VectorXd& log_weights, const Eigen::MatrixXd& stats,
                               const Eigen::VectorXd& eta) {
  const std::vector<double> logits = detail::tilt_logits(log_weights, stats, eta);
  return FiniteDistribution::over_indices(detail::normalized_exp(logits, numeric::log_sum_exp(logits)));
}

inline FiniteDistribution tilt(const MomentProblem& problem, const Eigen::VectorXd& eta) {
  return tilt(problem.log_base_weights(), problem.stats(), eta, problem.points());
}

/// The normalized base b = h / z(0).
inline FiniteDistribution normalized_base(const MomentProblem& problem) {
  return tilt(problem, Eigen::VectorXd::Zero(problem.dimension()));
}

/// E_q[t] for a distribution on the problem's support.
inline Eigen::VectorXd moments(const MomentProblem& problem, const FiniteDistribution& q) {
  if (static_cast<Eigen::Index>(q.size()) != problem.size())
    throw Error(ErrorKind::SupportMismatch, "distribution and problem support differ in length");
  return detail::expectation(q.probs(), problem.stats());
}

struct FeasibilityReport {
  bool feasible = false;
  /// Distance from the target to the nearest hull facet, negative outside.
  /// NaN when the hull is too large to enumerate and the dual decided feasibility.
  double margin = 0.0;
};

namespace detail {

inline double binomial_count(Eigen::Index n, Eigen::Index k) {
  double c = 1.0;
  for (Eigen::Index i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

// Visits every supporting hyperplane through d of the rows of `points`
// (exact facet enumeration of the convex hull) and returns the smallest
// signed distance from `target` to one of them.
inline double hull_margin(const Eigen::MatrixXd& points, const Eigen::VectorXd& target) {
  const Eigen::Index k = points.rows();
  const Eigen::Index d = points.cols();
  const double spread = (points.colwise().maxCoeff() - points.colwise().minCoeff()).maxCoeff();
  const double slack = 1e-12 * std::max(1.0, spread);
  double margin = std::numeric_limits<double>::infinity();

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) idx[i] = i;
  while (true) {
    Eigen::MatrixXd diffs(d - 1, d);
    for (Eigen::Index r = 1; r < d; ++r) diffs.row(r - 1) = points.row(idx[r]) - points.row(idx[0]);
    Eigen::VectorXd normal;
    if (d == 1) {
      normal = Eigen::VectorXd::Ones(1);
    } else {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(diffs);
      lu.setThreshold(1e-12);
      const Eigen::MatrixXd kernel = lu.kernel();
      if (kernel.cols() == 1 && lu.rank() == d - 1) normal = kernel.col(0).normalized();
    }
    if (normal.size() == d) {
      const Eigen::VectorXd offsets = (points.rowwise() - points.row(idx[0])) * normal;
      const bool below = offsets.maxCoeff() <= slack;
      const bool above = offsets.minCoeff() >= -slack;
      if (below != above) {
        const double sign = below ? -1.0 : 1.0;
        margin = std::min(margin, sign * normal.dot(target - points.row(idx[0]).transpose()));
      }
    }
    // next combination
    Eigen::Index pos = d - 1;
    while (pos >= 0 && idx[pos] == k - d + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (Eigen::Index r = pos + 1; r < d; ++r) idx[r] = idx[r - 1] + 1;
  }
  return margin;
}

}  // namespace detail

/// Whether the target lies strictly inside the convex hull of the statistic rows.
inline FeasibilityReport check_feasibility(const MomentProblem& problem, const numeric::Tolerance& tol = {});

/// Raised when the dual Newton iteration stops short of the tolerance.
class NotConvergedError : public Error {
 public:
  NotConvergedError(numeric::NewtonReport report, const std::string& what)
      : Error(ErrorKind::NotConverged, what), report_(std::move(report)) {}
  const numeric::NewtonReport& report() const noexcept { return report_; }

 private:
  numeric::NewtonReport report_;
};

struct MaxEntSolution {
  Eigen::VectorXd eta;
  FiniteDistribution dist;
  double dual_value = 0.0;  // a(eta) - <eta, mu_t> with the base normalized
  numeric::NewtonReport report;
};

/// Largest tolerated moment residual of a returned solution.
inline constexpr double kMomentTolerance = 1e-8;

/// The residual a solve under tol may leave: a looser abs_tol than
/// kMomentTolerance is honoured, a tighter one never loosens the check.
inline double moment_tolerance(const numeric::Tolerance& tol) { return std::max(kMomentTolerance, tol.abs_tol); }

namespace detail {

inline MaxEntSolution solve_dual_unchecked(const MomentProblem& problem, const numeric::Tolerance& tol) {
  const Eigen::MatrixXd& stats = problem.stats();
  const Eigen::VectorXd& mu = problem.target();
  // Normalizing the base makes a(0) = 0 and leaves the minimizer unchanged.
  const Eigen::VectorXd log_b = problem.log_base_weights().array() -
                                numeric::log_sum_exp(to_std(problem.log_base_weights()));

  auto probs_at = [&](const Eigen::VectorXd& eta) {
    const std::vector<double> logits = tilt_logits(log_b, stats, eta);
    return normalized_exp(logits, numeric::log_sum_exp(logits));
  };
  auto dual = [&](const Eigen::VectorXd& eta) {
    return tilt_log_partition(log_b, stats, eta) - eta.dot(mu);
  };
  auto grad = [&](const Eigen::VectorXd& eta) -> Eigen::VectorXd { return expectation(probs_at(eta), stats) - mu; };
  auto hess = [&](const Eigen::VectorXd& eta) { return covariance(probs_at(eta), stats); };

  numeric::NewtonReport report =
      numeric::newton_minimize(dual, grad, hess, Eigen::VectorXd::Zero(problem.dimension()), tol);
  if (!report.converged) {
    std::ostringstream msg;
    msg << "dual Newton stopped after " << report.iterations << " iterations with gradient norm "
        << report.final_grad_norm;
    throw NotConvergedError(std::move(report), msg.str());
  }
  FiniteDistribution dist = tilt(problem, report.solution);
  const double residual = (moments(problem, dist) - mu).cwiseAbs().maxCoeff();
  if (residual > moment_tolerance(tol)) {
    std::ostringstream msg;
    msg << "solution misses the target moments by " << residual;
    throw NotConvergedError(std::move(report), msg.str());
  }
  return {report.solution, std::move(dist), report.final_value, std::move(report)};
}

}  // namespace detail

inline FeasibilityReport check_feasibility(const MomentProblem& problem, const numeric::Tolerance& tol) {
  constexpr double kMaxFacetCandidates = 200000;
  const Eigen::MatrixXd& stats = problem.stats();
  const Eigen::VectorXd& mu = problem.target();
  const double spread = (stats.colwise().maxCoeff() - stats.colwise().minCoeff()).maxCoeff();
  const double threshold = 1e-12 * std::max(1.0, spread);
  FeasibilityReport r;
  if (problem.dimension() == 1) {
    r.margin = std::min(mu(0) - stats.col(0).minCoeff(), stats.col(0).maxCoeff() - mu(0));
  } else if (detail::binomial_count(problem.size(), problem.dimension()) <= kMaxFacetCandidates) {
    r.margin = detail::hull_margin(stats, mu);
  } else {
    // Too many facets to enumerate: the dual has a minimizer iff the target is interior.
    r.margin = std::numeric_limits<double>::quiet_NaN();
    try {
      detail::solve_dual_unchecked(problem, tol);
      r.feasible = true;
    } catch (const Error&) {
      r.feasible = false;
    }
    return r;
  }
  r.feasible = r.margin > threshold;
  return r;
}

/// Maximum-entropy distribution with the target moments, via Newton on the
/// convex dual a(eta) - <eta, mu_t> started at eta = 0.
inline MaxEntSolution solve_dual(const MomentProblem& problem, const numeric::Tolerance& tol = {}) {
  const FeasibilityReport feas = check_feasibility(problem, tol);
  if (!feas.feasible) {
    std::ostringstream msg;
    msg << "target moments are not strictly inside the convex hull of the statistics (margin " << feas.margin << ")";
    throw Error(ErrorKind::Infeasible, msg.str());
  }
  return detail::solve_dual_unchecked(problem, tol);
}

namespace detail {

// Orthonormal basis (K x m) of {v : stats^T v = 0, sum v = 0} and the
// minimum-norm solution of the moment and normalization constraints.
struct ConstraintGeometry {
  Eigen::VectorXd particular;
  Eigen::MatrixXd null_basis;
};

inline ConstraintGeometry constraint_geometry(const MomentProblem& problem) {
  const Eigen::Index k = problem.size();
  const Eigen::Index d = problem.dimension();
  Eigen::MatrixXd a(d + 1, k);
  a.topRows(d) = problem.stats().transpose();
  a.row(d).setOnes();
  Eigen::VectorXd rhs(d + 1);
  rhs << problem.target(), 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV | Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * sv(0)) ++rank;
  ConstraintGeometry g;
  g.particular = svd.solve(rhs);
  g.null_basis = svd.matrixV().rightCols(k - rank);
  return g;
}

}  // namespace detail

/// Brute-force maximizer of G(q, B) over the feasible polytope for small
/// problems: grid search over the null-space coordinates, then coordinate
/// ascent with exact line searches.
inline FiniteDistribution primal_oracle(const MomentProblem& problem, int resolution = 41) {
  constexpr Eigen::Index kMaxSupport = 6;
  constexpr Eigen::Index kMaxDimension = 2;
  if (problem.size() > kMaxSupport || problem.dimension() > kMaxDimension) {
    std::ostringstream msg;
    msg << "primal oracle handles K <= " << kMaxSupport << " and d <= " << kMaxDimension << " (got K="
        << problem.size() << ", d=" << problem.dimension() << ")";
    throw Error(ErrorKind::OracleScaleExceeded, msg.str());
  }
  if (resolution < 2) throw Error(ErrorKind::DomainError, "oracle resolution must be at least 2");
  if (!check_feasibility(problem).feasible) throw Error(ErrorKind::Infeasible, "oracle: target outside the hull");

  const auto geometry = detail::constraint_geometry(problem);
  const Eigen::MatrixXd& v = geometry.null_basis;
  const Eigen::Index m = v.cols();
  const Eigen::VectorXd log_b =
      problem.log_base_weights().array() - numeric::log_sum_exp(detail::to_std(problem.log_base_weights()));

  auto objective = [&](const Eigen::VectorXd& q) {
    if (q.minCoeff() < kProbabilityFloor) return -std::numeric_limits<double>::infinity();
    return -(q.array() * (q.array().log() - log_b.array())).sum();
  };

  // q0 is the projection of the origin onto the constraint plane, so every
  // feasible q satisfies |q - q0| <= 1 and its coordinates lie in [-1, 1].
  Eigen::VectorXd best_z = Eigen::VectorXd::Zero(m);
  double best = objective(geometry.particular);
  if (m > 0) {
    std::vector<int> counter(static_cast<std::size_t>(m), 0);
    Eigen::VectorXd z(m);
    while (true) {
      for (Eigen::Index j = 0; j < m; ++j) z(j) = -1.0 + 2.0 * counter[j] / (resolution - 1);
      const double value = objective(geometry.particular + v * z);
      if (value > best) {
        best = value;
        best_z = z;
      }
      Eigen::Index pos = 0;
      while (pos < m && ++counter[pos] == resolution) counter[pos++] = 0;
      if (pos == m) break;
    }
    if (!std::isfinite(best)) throw Error(ErrorKind::Infeasible, "oracle grid found no point above the floor");

    Eigen::VectorXd q = geometry.particular + v * best_z;
    for (int sweep = 0; sweep < 20000; ++sweep) {
      double moved = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::VectorXd dir = v.col(j);
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < q.size(); ++i) {
          if (dir(i) > 0.0) lo = std::max(lo, (kProbabilityFloor - q(i)) / dir(i));
          if (dir(i) < 0.0) hi = std::min(hi, (kProbabilityFloor - q(i)) / dir(i));
        }
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
        // Directional derivative of G along dir; decreasing in t.
        auto slope = [&](double t) {
          const Eigen::ArrayXd qt = (q + t * dir).array().max(kProbabilityFloor);
          return -(dir.array() * (qt.log() - log_b.array())).sum();
        };
        double t;
        if (slope(lo) <= 0.0) {
          t = lo;
        } else if (slope(hi) >= 0.0) {
          t = hi;
        } else {
          double a = lo, b = hi;
          for (int it = 0; it < 200 && b - a > 1e-17; ++it) {
            const double mid = 0.5 * (a + b);
            (slope(mid) > 0.0 ? a : b) = mid;
          }
          t = 0.5 * (a + b);
        }
        q += t * dir;
        moved = std::max(moved, std::abs(t));
      }
      if (moved < 1e-15) break;
    }
    best_z = v.transpose() * (q - geometry.particular);
  }
  Eigen::VectorXd q = (geometry.particular + v * best_z).cwiseMax(kProbabilityFloor);
  q /= q.sum();
  return {problem.points(), detail::to_std(q)};
}

/// A random distribution with the same moments as the anchor: a step of
/// length min(step, t_max) along a random null-space direction of the
/// constraints, where t_max keeps every coordinate at or above the floor.
inline FiniteDistribution random_feasible(const MomentProblem& problem, const FiniteDistribution& anchor,
                                          std::uint64_t seed, double step) {
  if (static_cast<Eigen::Index>(anchor.size()) != problem.size())
    throw Error(ErrorKind::SupportMismatch, "anchor and problem support differ in length");
  if (!(step >= 0.0) || !std::isfinite(step)) throw Error(ErrorKind::DomainError, "step must be finite and >= 0");
  if (*std::min_element(anchor.probs().begin(), anchor.probs().end()) < kProbabilityFloor)
    throw Error(ErrorKind::DomainError, "anchor must be strictly positive");
  if ((moments(problem, anchor) - problem.target()).cwiseAbs().maxCoeff() > kMomentTolerance)
    throw Error(ErrorKind::Infeasible, "anchor does not reproduce the target moments");
  const Eigen::MatrixXd basis = detail::constraint_geometry(problem).null_basis;
  if (basis.cols() == 0)
    throw Error(ErrorKind::DegenerateNullSpace, "the moment constraints pin down a single distribution (K = d+1)");
  if (step == 0.0) return anchor;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd coeffs(basis.cols());
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) coeffs(j) = normal(rng);
  const Eigen::VectorXd dir = basis * coeffs.normalized();

  const Eigen::Map<const Eigen::VectorXd> p(anchor.probs().data(), problem.size());
  double t = step;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (dir(i) < 0.0) t = std::min(t, (p(i) - kProbabilityFloor) / -dir(i));
  return {anchor.points(), detail::to_std(p + t * dir)};
}

struct VerificationReport {
  std::optional<double> min_gap;  // absent when no trial ran
  bool all_hold = true;
  int trials = 0;
  double max_identity_error = 0.0;  // largest deviation of the proof identity
  double max_kl_error = 0.0;        // largest |gap - KL(Q || P)|, Prop 1 only
  MaxEntSolution solution;
};

inline constexpr double kIdentityTolerance = 1e-10;

namespace detail {

// Draws competitors Q != P; calls visit(q) for each.
template <class Visit>
void for_each_competitor(const MomentProblem& problem, const FiniteDistribution& p, int trials, std::uint64_t seed,
                         Visit&& visit) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> step(0.05, 1.0);
  for (int trial = 0; trial < trials; ++trial) {
    // A step pinned to near zero by a tiny coordinate of P is redrawn: the
    // resulting Q would be indistinguishable from P at double precision.
    for (int attempt = 0;; ++attempt) {
      const FiniteDistribution q = random_feasible(problem, p, rng(), step(rng));
      if (total_variation(q, p) > 1e-6 || attempt == 100) {
        visit(q);
        break;
      }
    }
  }
}

inline void fail_verification(const std::string& relation, const FiniteDistribution& q, const std::string& what) {
  throw InvariantViolation(relation, q.probs(), what);
}

}  // namespace detail

/// Checks that the tilted P maximizes G(., B) among random competitors with
/// the same moments, and that H(Q,P) = H(P) - H(P,B) + H(Q,B) for each.
inline VerificationReport verify_prop1(const MomentProblem& problem, int trials, std::uint64_t seed,
                                       const numeric::Tolerance& tol = {}) {
  if (trials < 0) throw Error(ErrorKind::DomainError, "trials must be >= 0");
  VerificationReport r{.solution = solve_dual(problem, tol)};
  const FiniteDistribution& p = r.solution.dist;
  const FiniteDistribution b = normalized_base(problem);
  const double g_p = relative_entropy_g(p, b);
  const double h_p = entropy(p);
  const double h_pb = cross_entropy(p, b);

  detail::for_each_competitor(problem, p, trials, seed, [&](const FiniteDistribution& q) {
    ++r.trials;
    const double gap = g_p - relative_entropy_g(q, b);
    const double identity = std::abs(cross_entropy(q, p) - (h_p - h_pb + cross_entropy(q, b)));
    const double kl_error = std::abs(gap - kl_divergence(q, p));
    r.min_gap = r.min_gap ? std::min(*r.min_gap, gap) : gap;
    r.max_identity_error = std::max(r.max_identity_error, identity);
    r.max_kl_error = std::max(r.max_kl_error, kl_error);
    std::ostringstream msg;
    msg.precision(17);
    if (!(gap > 0.0)) {
      msg << "G(P,B) - G(Q,B) = " << gap << " is not positive";
      detail::fail_verification("prop1-gap", q, msg.str());
    }
    if (identity > kIdentityTolerance) {
      msg << "H(Q,P) = H(P) - H(P,B) + H(Q,B) off by " << identity;
      detail::fail_verification("prop1-identity", q, msg.str());
    }
    if (kl_error > kIdentityTolerance) {
      msg << "gap differs from KL(Q||P) by " << kl_error;
      detail::fail_verification("prop1-kl", q, msg.str());
    }
  });
  return r;
}

/// Uniform-base case: H(P) > H(Q) for random competitors and H(Q,P) = H(P).
inline VerificationReport verify_prop2(const MomentProblem& problem, int trials, std::uint64_t seed,
                                       const numeric::Tolerance& tol = {}) {
  if (trials < 0) throw Error(ErrorKind::DomainError, "trials must be >= 0");
  if (!problem.uniform_base()) throw Error(ErrorKind::DomainError, "verify_prop2 needs equal base weights");
  VerificationReport r{.solution = solve_dual(problem, tol)};
  const FiniteDistribution& p = r.solution.dist;
  const double h_p = entropy(p);

  detail::for_each_competitor(problem, p, trials, seed, [&](const FiniteDistribution& q) {
    ++r.trials;
    const double gap = h_p - entropy(q);
    const double identity = std::abs(cross_entropy(q, p) - h_p);
    r.min_gap = r.min_gap ? std::min(*r.min_gap, gap) : gap;
    r.max_identity_error = std::max(r.max_identity_error, identity);
    std::ostringstream msg;
    msg.precision(17);
    if (!(gap > 0.0)) {
      msg << "H(P) - H(Q) = " << gap << " is not positive";
      detail::fail_verification("prop2-gap", q, msg.str());
    }
    if (identity > kIdentityTolerance) {
      msg << "H(Q,P) = H(P) off by " << identity;
      detail::fail_verification("prop2-identity", q, msg.str());
    }
  });
  return r;
}

/// Random well-posed problem on {0..K-1} with t = (x, x^2, ...): target moments
/// are those of a random tilt, so it is strictly feasible.
inline MomentProblem random_moment_problem(std::uint64_t seed, Eigen::Index k, Eigen::Index d, bool uniform_base) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd log_w = Eigen::VectorXd::Zero(k);
  if (!uniform_base)
    for (Eigen::Index i = 0; i < k; ++i) log_w(i) = normal(rng);
  Eigen::MatrixXd stats(k, d);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < d; ++j) stats(i, j) = std::pow(static_cast<double>(i), static_cast<double>(j + 1));
  Eigen::VectorXd eta(d);
  for (Eigen::Index j = 0; j < d; ++j)
    eta(j) = 0.5 * normal(rng) / std::pow(static_cast<double>(k - 1), static_cast<double>(j + 1));
  const FiniteDistribution p = tilt(log_w, stats, eta);
  return {log_w, stats, detail::expectation(p.probs(), stats)};
}

}  // namespace expfam
