#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "expfam/error.hpp"
#include "expfam/numeric/special_functions.hpp"
#include "expfam/numeric/summation.hpp"

namespace expfam {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Two distributions closer than this in total variation are treated as equal.
inline constexpr double kEqualityThreshold = 1e-12;

/// Probability vector over K >= 1 distinct real support points.
class FiniteDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  FiniteDistribution(std::vector<double> points, std::vector<double> probs)
      : points_(std::move(points)), probs_(std::move(probs)) {
    validate();
  }

  /// Support points 0, 1, ..., K-1.
  static FiniteDistribution over_indices(std::vector<double> probs) {
    std::vector<double> points(probs.size());
    for (std::size_t i = 0; i < points.size(); ++i) points[i] = static_cast<double>(i);
    return {std::move(points), std::move(probs)};
  }

  static FiniteDistribution uniform(std::size_t k) {
    return over_indices(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  void validate() const {
    if (probs_.empty()) throw Error(ErrorKind::InvalidDistribution, "distribution needs at least one support point");
    if (points_.size() != probs_.size())
      throw Error(ErrorKind::InvalidDistribution, "support points and probabilities differ in length");
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        std::ostringstream msg;
        msg << "probabilities must be finite and non-negative (got " << p << ")";
        throw Error(ErrorKind::InvalidDistribution, msg.str());
      }
    }
    const double total = numeric::ordered_sum(probs_);
    if (std::abs(total - 1.0) > kSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "probabilities sum to " << total << ", not 1";
      throw Error(ErrorKind::InvalidDistribution, msg.str());
    }
    std::vector<double> sorted = points_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorKind::InvalidDistribution, "support points must be distinct");
  }

  std::vector<double> points_;
  std::vector<double> probs_;
};

/// Class counts n_1..n_K of a macrostate.
struct CountVector {
  std::vector<long> counts;

  explicit CountVector(std::vector<long> c) : counts(std::move(c)) {
    if (counts.empty()) throw Error(ErrorKind::InvalidDistribution, "count vector needs at least one class");
    for (long n : counts)
      if (n < 0) throw Error(ErrorKind::InvalidDistribution, "counts must be non-negative");
    if (total() < 1) throw Error(ErrorKind::InvalidDistribution, "count vector needs n >= 1");
  }

  long total() const {
    long n = 0;
    for (long c : counts) n += c;
    return n;
  }
  std::size_t size() const { return counts.size(); }
};

/// Affine representative k * H + c of the entropy equivalence class.
struct EntropyUnits {
  double scale_k = 1.0;
  double offset_c = 0.0;

  static EntropyUnits nats() { return {}; }
  static EntropyUnits bits() { return {1.0 / std::numbers::ln2, 0.0}; }

  void validate() const {
    if (!(scale_k > 0.0) || !std::isfinite(scale_k) || !std::isfinite(offset_c))
      throw Error(ErrorKind::DomainError, "entropy units need a finite scale_k > 0 and a finite offset_c");
  }
};

namespace detail {

inline void require_same_support(const FiniteDistribution& q, const FiniteDistribution& p) {
  if (q.size() != p.size()) {
    std::ostringstream msg;
    msg << "distributions have " << q.size() << " and " << p.size() << " support points";
    throw Error(ErrorKind::SupportMismatch, msg.str());
  }
}

inline double apply_units(double value, const EntropyUnits& units) {
  units.validate();
  return units.scale_k * value + units.offset_c;
}

inline double entropy_nats(const FiniteDistribution& q) {
  std::vector<double> terms;
  terms.reserve(q.size());
  for (double qi : q.probs()) terms.push_back(qi > 0.0 ? -qi * std::log(qi) : 0.0);
  return numeric::ordered_sum(std::move(terms));
}

inline double cross_entropy_nats(const FiniteDistribution& q, const FiniteDistribution& p) {
  require_same_support(q, p);
  std::vector<double> terms;
  terms.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) return kInf;
    terms.push_back(-q[i] * std::log(p[i]));
  }
  return numeric::ordered_sum(std::move(terms));
}

inline double kl_nats(const FiniteDistribution& q, const FiniteDistribution& p) {
  require_same_support(q, p);
  std::vector<double> terms;
  terms.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) return kInf;
    terms.push_back(q[i] * std::log(q[i] / p[i]));
  }
  return numeric::ordered_sum(std::move(terms));
}

}  // namespace detail

/// H(Q) = -sum q log q with 0 log 0 = 0, mapped to k H + c.
inline double entropy(const FiniteDistribution& q, const EntropyUnits& units = {}) {
  return detail::apply_units(detail::entropy_nats(q), units);
}

/// -log p_i; +inf for an impossible outcome.
inline double log_loss(std::size_t index, const FiniteDistribution& p) {
  if (index >= p.size()) {
    std::ostringstream msg;
    msg << "outcome index " << index << " outside a support of size " << p.size();
    throw Error(ErrorKind::IndexOutOfRange, msg.str());
  }
  return p[index] > 0.0 ? -std::log(p[index]) : kInf;
}

/// Risk H(Q, P) = -sum q log p, mapped to k H + c.
inline double cross_entropy(const FiniteDistribution& q, const FiniteDistribution& p, const EntropyUnits& units = {}) {
  return detail::apply_units(detail::cross_entropy_nats(q, p), units);
}

/// KL(Q || P) scaled by k. The offset cancels.
inline double kl_divergence(const FiniteDistribution& q, const FiniteDistribution& p, const EntropyUnits& units = {}) {
  units.validate();
  return units.scale_k * detail::kl_nats(q, p);
}

/// Entropy with prior measure G(Q, P) = H(Q) - H(Q, P) = -KL(Q || P), scaled by k.
inline double relative_entropy_g(const FiniteDistribution& q, const FiniteDistribution& p,
                                 const EntropyUnits& units = {}) {
  return -kl_divergence(q, p, units);
}

inline double total_variation(const FiniteDistribution& q, const FiniteDistribution& p) {
  detail::require_same_support(q, p);
  std::vector<double> terms(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) terms[i] = std::abs(q[i] - p[i]);
  return 0.5 * numeric::ordered_sum(std::move(terms));
}

inline bool same_distribution(const FiniteDistribution& q, const FiniteDistribution& p) {
  return total_variation(q, p) <= kEqualityThreshold;
}

struct GibbsReport {
  double lhs = 0.0;  // H(Q)
  double rhs = 0.0;  // H(Q, P)
  double gap = 0.0;  // rhs - lhs, equal to KL(Q || P)
  bool holds = false;
  bool tight = false;
};

/// Checks the properness inequality H(Q, P) >= H(Q). A failure can only be an
/// implementation bug and is raised as InvariantViolation.
inline GibbsReport gibbs_check(const FiniteDistribution& q, const FiniteDistribution& p) {
  GibbsReport r;
  r.lhs = detail::entropy_nats(q);
  r.rhs = detail::cross_entropy_nats(q, p);
  r.gap = detail::kl_nats(q, p);
  const double tol = 1e-12 * std::max(1.0, std::abs(r.lhs));
  r.holds = r.rhs >= r.lhs - tol && r.gap >= -tol;
  if (std::isfinite(r.rhs)) r.holds = r.holds && std::abs((r.rhs - r.lhs) - r.gap) <= tol * std::max(1.0, r.rhs);
  r.tight = same_distribution(q, p);
  if (!r.holds) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Gibbs inequality failed: H(Q)=" << r.lhs << " H(Q,P)=" << r.rhs << " KL=" << r.gap;
    throw InvariantViolation("gibbs", q.probs(), msg.str());
  }
  return r;
}

/// log W = log n! - sum log n_k!.
inline double log_multiplicity(const CountVector& d) {
  std::vector<double> terms;
  terms.push_back(numeric::log_gamma_fn(static_cast<double>(d.total()) + 1.0));
  for (long n : d.counts) terms.push_back(-numeric::log_gamma_fn(static_cast<double>(n) + 1.0));
  return numeric::ordered_sum(std::move(terms));
}

/// log P(D | p) = log W + sum n_k log p_k; -inf when a class with counts has p_k = 0.
inline double log_macrostate_prob(const CountVector& d, const FiniteDistribution& p) {
  if (d.size() != p.size()) throw Error(ErrorKind::SupportMismatch, "count vector and distribution differ in length");
  std::vector<double> terms;
  terms.push_back(log_multiplicity(d));
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d.counts[k] == 0) continue;
    if (p[k] == 0.0) return -kInf;
    terms.push_back(static_cast<double>(d.counts[k]) * std::log(p[k]));
  }
  return numeric::ordered_sum(std::move(terms));
}

/// Empirical distribution q_k = n_k / n over class indices.
inline FiniteDistribution empirical(const CountVector& d) {
  const double n = static_cast<double>(d.total());
  std::vector<double> probs;
  probs.reserve(d.size());
  for (long c : d.counts) probs.push_back(static_cast<double>(c) / n);
  return FiniteDistribution::over_indices(std::move(probs));
}

/// (1/n) log W - H(q_hat).
inline double entropy_rate_gap(const CountVector& d) {
  return log_multiplicity(d) / static_cast<double>(d.total()) - detail::entropy_nats(empirical(d));
}

/// (1/n) log P(D | p) - G(q_hat, P).
inline double g_rate_gap(const CountVector& d, const FiniteDistribution& p) {
  const double log_prob = log_macrostate_prob(d, p);
  if (!std::isfinite(log_prob))
    throw Error(ErrorKind::ImpossibleMacrostate, "observed counts fall on a class with zero prior probability");
  return log_prob / static_cast<double>(d.total()) - relative_entropy_g(empirical(d), p);
}

/// Q_lambda = (1 - lambda) Q0 + lambda Q1 on the support of q0.
inline FiniteDistribution mixture(const FiniteDistribution& q0, const FiniteDistribution& q1, double lambda) {
  detail::require_same_support(q0, q1);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorKind::DomainError, "mixture weight must lie in [0, 1]");
  std::vector<double> probs(q0.size());
  for (std::size_t i = 0; i < q0.size(); ++i) probs[i] = (1.0 - lambda) * q0[i] + lambda * q1[i];
  return {q0.points(), std::move(probs)};
}

struct ConcavityReport {
  double lhs = 0.0;  // H(Q_lambda)
  double rhs = 0.0;  // (1 - lambda) H(Q0) + lambda H(Q1)
  bool strict = false;
  std::optional<double> g_lhs;  // G(Q_lambda, P), present when a reference was given
  std::optional<double> g_rhs;
  double risk_lhs = 0.0;  // H(Q_lambda, P)
  double risk_rhs = 0.0;  // (1 - lambda) H(Q0, P) + lambda H(Q1, P)
};

/// Evaluates both sides of the strict concavity inequalities for H (and G when
/// a reference p is given) plus the linearity of the risk in Q. Without p the
/// risk identity is checked against the uniform distribution.
inline ConcavityReport concavity_witness(const FiniteDistribution& q0, const FiniteDistribution& q1, double lambda,
                                         const std::optional<FiniteDistribution>& p = std::nullopt) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::DomainError, "concavity witness needs 0 < lambda < 1");
  const FiniteDistribution mixed = mixture(q0, q1, lambda);
  ConcavityReport r;
  r.lhs = detail::entropy_nats(mixed);
  r.rhs = (1.0 - lambda) * detail::entropy_nats(q0) + lambda * detail::entropy_nats(q1);
  r.strict = !same_distribution(q0, q1);

  auto fail = [&](const std::string& relation, const std::string& what) {
    std::vector<double> witness = q0.probs();
    witness.insert(witness.end(), q1.probs().begin(), q1.probs().end());
    witness.push_back(lambda);
    throw InvariantViolation(relation, std::move(witness), what);
  };
  const double tol = 1e-12 * std::max(1.0, std::abs(r.lhs));
  if (r.strict ? !(r.lhs > r.rhs) : std::abs(r.lhs - r.rhs) > tol)
    fail("entropy-concavity", "strict concavity of H failed");

  const FiniteDistribution reference = p ? *p : FiniteDistribution::uniform(q0.size());
  detail::require_same_support(q0, reference);
  r.risk_lhs = detail::cross_entropy_nats(mixed, reference);
  r.risk_rhs = (1.0 - lambda) * detail::cross_entropy_nats(q0, reference) +
               lambda * detail::cross_entropy_nats(q1, reference);
  const bool risk_ok = std::isfinite(r.risk_lhs)
                           ? std::abs(r.risk_lhs - r.risk_rhs) <= 1e-12 * std::max(1.0, std::abs(r.risk_lhs))
                           : r.risk_lhs == r.risk_rhs;
  if (!risk_ok) fail("risk-linearity", "risk H(Q, P) is not mixture-preserving");

  if (p) {
    r.g_lhs = -detail::kl_nats(mixed, *p);
    r.g_rhs = -(1.0 - lambda) * detail::kl_nats(q0, *p) - lambda * detail::kl_nats(q1, *p);
    if (std::isfinite(*r.g_rhs)) {
      const double gtol = 1e-12 * std::max(1.0, std::abs(*r.g_lhs));
      if (r.strict ? !(*r.g_lhs > *r.g_rhs) : std::abs(*r.g_lhs - *r.g_rhs) > gtol)
        fail("g-concavity", "strict concavity of G failed");
    }
  }
  return r;
}

}  // namespace expfam
