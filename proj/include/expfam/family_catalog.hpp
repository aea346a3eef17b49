#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Core>

#include "expfam/error.hpp"
#include "expfam/numeric/finite_difference.hpp"
#include "expfam/numeric/special_functions.hpp"

namespace expfam {

enum class FamilyKind { Binomial, Poisson, Normal, Gamma, SqrtGamma };

enum class SupportKind { FiniteRange, Countable, RealLine, PositiveReals };

/// supp(h) of a catalog family.
struct SupportDescriptor {
  SupportKind kind = SupportKind::RealLine;
  int upper = 0;  // last point of a FiniteRange {0, ..., upper}

  bool discrete() const { return kind == SupportKind::FiniteRange || kind == SupportKind::Countable; }

  bool contains(double x) const {
    switch (kind) {
      case SupportKind::FiniteRange: return x >= 0.0 && x <= upper && std::floor(x) == x;
      case SupportKind::Countable: return x >= 0.0 && std::isfinite(x) && std::floor(x) == x;
      case SupportKind::RealLine: return std::isfinite(x);
      case SupportKind::PositiveReals: return x > 0.0 && std::isfinite(x);
    }
    return false;
  }
};

/// One of the five closed-form univariate families. The binomial trial count
/// is the only fixed shape parameter.
class ClosedFormFamily {
 public:
  static ClosedFormFamily binomial(int n) {
    if (n < 1) throw Error(ErrorKind::DomainError, "binomial family requires n >= 1");
    return ClosedFormFamily(FamilyKind::Binomial, n, {SupportKind::FiniteRange, n});
  }
  static ClosedFormFamily poisson() { return {FamilyKind::Poisson, std::nullopt, {SupportKind::Countable, 0}}; }
  static ClosedFormFamily normal() { return {FamilyKind::Normal, std::nullopt, {SupportKind::RealLine, 0}}; }
  static ClosedFormFamily gamma() { return {FamilyKind::Gamma, std::nullopt, {SupportKind::PositiveReals, 0}}; }
  static ClosedFormFamily sqrt_gamma() {
    return {FamilyKind::SqrtGamma, std::nullopt, {SupportKind::PositiveReals, 0}};
  }

  /// Lookup by the lowercase CLI name; n is required for "binomial" only.
  static ClosedFormFamily from_name(std::string_view name, std::optional<int> n = std::nullopt) {
    if (name == "binomial") {
      if (!n) throw Error(ErrorKind::DomainError, "binomial family requires the trial count n");
      return binomial(*n);
    }
    if (name == "poisson") return poisson();
    if (name == "normal") return normal();
    if (name == "gamma") return gamma();
    if (name == "sqrtgamma") return sqrt_gamma();
    throw Error(ErrorKind::Unsupported, "unknown family '" + std::string(name) + "'");
  }

  FamilyKind kind() const { return kind_; }
  std::optional<int> fixed_shape() const { return fixed_shape_; }
  int trials() const { return fixed_shape_.value_or(0); }
  const SupportDescriptor& support() const { return support_; }
  int dimension() const { return kind_ == FamilyKind::Binomial || kind_ == FamilyKind::Poisson ? 1 : 2; }

  std::string_view name() const {
    switch (kind_) {
      case FamilyKind::Binomial: return "binomial";
      case FamilyKind::Poisson: return "poisson";
      case FamilyKind::Normal: return "normal";
      case FamilyKind::Gamma: return "gamma";
      case FamilyKind::SqrtGamma: return "sqrtgamma";
    }
    return "unknown";
  }

 private:
  ClosedFormFamily(FamilyKind kind, std::optional<int> shape, SupportDescriptor support)
      : kind_(kind), fixed_shape_(shape), support_(support) {}

  FamilyKind kind_;
  std::optional<int> fixed_shape_;
  SupportDescriptor support_;
};

struct CanonicalParams {
  Eigen::VectorXd eta;
};

struct MeanParams {
  Eigen::VectorXd mu;
};

struct BinomialParams {
  double theta;
};
struct PoissonParams {
  double lambda;
};
struct NormalParams {
  double mean;
  double variance;
};
/// Gamma and square-root gamma share the (alpha, theta) parametrization.
struct ShapeScaleParams {
  double shape;
  double scale;
};

using StandardParams = std::variant<BinomialParams, PoissonParams, NormalParams, ShapeScaleParams>;

inline CanonicalParams canonical(std::initializer_list<double> values) {
  CanonicalParams p;
  p.eta = Eigen::VectorXd::Map(values.begin(), static_cast<Eigen::Index>(values.size()));
  return p;
}

namespace detail {

[[noreturn]] inline void domain_violation(const ClosedFormFamily& family, const std::string& bound, double value) {
  std::ostringstream msg;
  msg << family.name() << ": canonical parameter violates " << bound << " (got " << value << ")";
  throw Error(ErrorKind::DomainError, msg.str());
}

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

/// Throws DomainError unless eta lies in the family's canonical domain
/// (the set where the partition function is finite).
inline void require_canonical(const ClosedFormFamily& family, const CanonicalParams& params) {
  const Eigen::VectorXd& eta = params.eta;
  if (eta.size() != family.dimension()) {
    std::ostringstream msg;
    msg << family.name() << ": expected " << family.dimension() << " canonical parameter(s), got " << eta.size();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (!std::isfinite(eta[i])) detail::domain_violation(family, "finiteness", eta[i]);
  }
  switch (family.kind()) {
    case FamilyKind::Binomial:
    case FamilyKind::Poisson: return;
    case FamilyKind::Normal:
      if (!(eta[1] < 0.0)) detail::domain_violation(family, "eta2 < 0", eta[1]);
      return;
    case FamilyKind::Gamma:
    case FamilyKind::SqrtGamma:
      if (!(eta[0] < 0.0)) detail::domain_violation(family, "eta1 < 0", eta[0]);
      if (!(eta[1] > -1.0)) detail::domain_violation(family, "eta2 > -1", eta[1]);
      return;
  }
}

inline void require_support(const ClosedFormFamily& family, double x) {
  if (!family.support().contains(x)) {
    std::ostringstream msg;
    msg << family.name() << ": x = " << x << " is outside the support";
    throw Error(ErrorKind::OutOfSupport, msg.str());
  }
}

/// log h(x).
inline double log_base(const ClosedFormFamily& family, double x) {
  require_support(family, x);
  switch (family.kind()) {
    case FamilyKind::Binomial: return numeric::log_binomial_coefficient(family.trials(), x);
    case FamilyKind::Poisson: return -numeric::log_gamma_fn(x + 1.0);
    default: return 0.0;
  }
}

/// t(x): x; (x, x^2); (x, log x); (x^2, log x) by family.
inline Eigen::VectorXd canonical_stats(const ClosedFormFamily& family, double x) {
  require_support(family, x);
  Eigen::VectorXd t(family.dimension());
  switch (family.kind()) {
    case FamilyKind::Binomial:
    case FamilyKind::Poisson: t << x; break;
    case FamilyKind::Normal: t << x, x * x; break;
    case FamilyKind::Gamma: t << x, std::log(x); break;
    case FamilyKind::SqrtGamma: t << x * x, std::log(x); break;
  }
  return t;
}

/// a(eta) = log z(eta) from the closed-form partition functions.
inline double log_partition(const ClosedFormFamily& family, const CanonicalParams& params) {
  require_canonical(family, params);
  const Eigen::VectorXd& eta = params.eta;
  switch (family.kind()) {
    case FamilyKind::Binomial: return family.trials() * detail::softplus(eta[0]);
    case FamilyKind::Poisson: return std::exp(eta[0]);
    case FamilyKind::Normal:
      return 0.5 * std::log(-std::numbers::pi / eta[1]) - eta[0] * eta[0] / (4.0 * eta[1]);
    case FamilyKind::Gamma: return -(eta[1] + 1.0) * std::log(-eta[0]) + numeric::log_gamma_fn(eta[1] + 1.0);
    case FamilyKind::SqrtGamma: {
      const double shape = 0.5 * (eta[1] + 1.0);
      return -std::numbers::ln2 - shape * std::log(-eta[0]) + numeric::log_gamma_fn(shape);
    }
  }
  return 0.0;
}

/// log p(x | eta) = log h(x) + <eta, t(x)> - a(eta).
inline double log_pdmf(const ClosedFormFamily& family, const CanonicalParams& params, double x) {
  const double a = log_partition(family, params);
  return log_base(family, x) + params.eta.dot(canonical_stats(family, x)) - a;
}

inline double pdmf(const ClosedFormFamily& family, const CanonicalParams& params, double x) {
  return std::exp(log_pdmf(family, params, x));
}

/// E[t(x)] = grad a(eta), closed form.
inline MeanParams mean_stats(const ClosedFormFamily& family, const CanonicalParams& params) {
  require_canonical(family, params);
  const Eigen::VectorXd& eta = params.eta;
  MeanParams out;
  out.mu.resize(family.dimension());
  switch (family.kind()) {
    case FamilyKind::Binomial: out.mu << family.trials() * detail::logistic(eta[0]); break;
    case FamilyKind::Poisson: out.mu << std::exp(eta[0]); break;
    case FamilyKind::Normal: {
      const double variance = -0.5 / eta[1];
      const double mean = eta[0] * variance;
      out.mu << mean, variance + mean * mean;
      break;
    }
    case FamilyKind::Gamma: {
      const double shape = eta[1] + 1.0;
      const double scale = -1.0 / eta[0];
      out.mu << shape * scale, numeric::digamma_fn(shape) + std::log(scale);
      break;
    }
    case FamilyKind::SqrtGamma: {
      const double shape = 0.5 * (eta[1] + 1.0);
      const double scale = -1.0 / eta[0];
      out.mu << shape * scale, 0.5 * (numeric::digamma_fn(shape) + std::log(scale));
      break;
    }
  }
  return out;
}

/// Var[t(x)] = Hessian of a(eta). Closed form for the one-parameter families;
/// a symmetrized finite-difference Jacobian of mean_stats otherwise.
inline Eigen::MatrixXd var_stats(const ClosedFormFamily& family, const CanonicalParams& params) {
  require_canonical(family, params);
  const Eigen::VectorXd& eta = params.eta;
  Eigen::MatrixXd var(family.dimension(), family.dimension());
  switch (family.kind()) {
    case FamilyKind::Binomial: {
      const double p = detail::logistic(eta[0]);
      var << family.trials() * p * (1.0 - p);
      return var;
    }
    case FamilyKind::Poisson: var << std::exp(eta[0]); return var;
    default: break;
  }
  auto mean_map = [&](const Eigen::VectorXd& e) { return mean_stats(family, CanonicalParams{e}).mu; };
  const Eigen::MatrixXd jac = numeric::fd_jacobian(mean_map, eta);
  return 0.5 * (jac + jac.transpose());
}

namespace detail {

template <class T>
const T& expect_params(const ClosedFormFamily& family, const StandardParams& params) {
  if (const T* p = std::get_if<T>(&params)) return *p;
  throw Error(ErrorKind::DimensionMismatch,
              std::string(family.name()) + ": standard parameters of the wrong kind for this family");
}

[[noreturn]] inline void standard_violation(const ClosedFormFamily& family, const std::string& bound, double value) {
  std::ostringstream msg;
  msg << family.name() << ": standard parameter violates " << bound << " (got " << value << ")";
  throw Error(ErrorKind::DomainError, msg.str());
}

}  // namespace detail

inline CanonicalParams to_canonical(const ClosedFormFamily& family, const StandardParams& params) {
  CanonicalParams out;
  out.eta.resize(family.dimension());
  switch (family.kind()) {
    case FamilyKind::Binomial: {
      const double theta = detail::expect_params<BinomialParams>(family, params).theta;
      if (!(theta > 0.0 && theta < 1.0)) detail::standard_violation(family, "0 < theta < 1", theta);
      out.eta << std::log(theta) - std::log1p(-theta);
      break;
    }
    case FamilyKind::Poisson: {
      const double lambda = detail::expect_params<PoissonParams>(family, params).lambda;
      if (!(lambda > 0.0) || std::isinf(lambda)) detail::standard_violation(family, "lambda > 0", lambda);
      out.eta << std::log(lambda);
      break;
    }
    case FamilyKind::Normal: {
      const auto& p = detail::expect_params<NormalParams>(family, params);
      if (!std::isfinite(p.mean)) detail::standard_violation(family, "finite mu", p.mean);
      if (!(p.variance > 0.0) || std::isinf(p.variance)) detail::standard_violation(family, "sigma2 > 0", p.variance);
      out.eta << p.mean / p.variance, -0.5 / p.variance;
      break;
    }
    case FamilyKind::Gamma:
    case FamilyKind::SqrtGamma: {
      const auto& p = detail::expect_params<ShapeScaleParams>(family, params);
      if (!(p.shape > 0.0) || std::isinf(p.shape)) detail::standard_violation(family, "alpha > 0", p.shape);
      if (!(p.scale > 0.0) || std::isinf(p.scale)) detail::standard_violation(family, "theta > 0", p.scale);
      const double second = family.kind() == FamilyKind::Gamma ? p.shape - 1.0 : 2.0 * p.shape - 1.0;
      out.eta << -1.0 / p.scale, second;
      break;
    }
  }
  return out;
}

inline StandardParams to_standard(const ClosedFormFamily& family, const CanonicalParams& params) {
  require_canonical(family, params);
  const Eigen::VectorXd& eta = params.eta;
  switch (family.kind()) {
    case FamilyKind::Binomial: return BinomialParams{detail::logistic(eta[0])};
    case FamilyKind::Poisson: return PoissonParams{std::exp(eta[0])};
    case FamilyKind::Normal: {
      const double variance = -0.5 / eta[1];
      return NormalParams{eta[0] * variance, variance};
    }
    case FamilyKind::Gamma: return ShapeScaleParams{eta[1] + 1.0, -1.0 / eta[0]};
    case FamilyKind::SqrtGamma: return ShapeScaleParams{0.5 * (eta[1] + 1.0), -1.0 / eta[0]};
  }
  throw Error(ErrorKind::Unsupported, "unknown family");
}

/// Differential entropy (log(2 pi sigma^2) + 1) / 2 in nats; normal family only.
inline double entropy_closed(const ClosedFormFamily& family, const CanonicalParams& params) {
  if (family.kind() != FamilyKind::Normal)
    throw Error(ErrorKind::Unsupported, std::string(family.name()) + ": closed-form entropy is only provided for normal");
  require_canonical(family, params);
  const double variance = -0.5 / params.eta[1];
  return 0.5 * (std::log(2.0 * std::numbers::pi * variance) + 1.0);
}

}  // namespace expfam
