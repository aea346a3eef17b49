#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "expfam/error.hpp"

namespace expfam::numeric {

namespace detail {

template <class F>
double checked_probe(F& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "finite-difference probe evaluated to a non-finite value");
  return v;
}

inline double fd_step(double xi, double exponent) {
  return std::max(std::abs(xi), 1.0) * std::pow(std::numeric_limits<double>::epsilon(), exponent);
}

}  // namespace detail

/// Central-difference gradient with h_i = max(|x_i|, 1) * eps^(1/3).
template <class F>
Eigen::VectorXd fd_gradient(F&& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = detail::fd_step(x[i], 1.0 / 3.0);
    Eigen::VectorXd up = x;
    Eigen::VectorXd down = x;
    up[i] += h;
    down[i] -= h;
    // Use the step actually representable in floating point.
    const double span = up[i] - down[i];
    grad[i] = (detail::checked_probe(f, up) - detail::checked_probe(f, down)) / span;
  }
  return grad;
}

/// Central-difference Hessian with h_i = max(|x_i|, 1) * eps^(1/4), symmetrized.
template <class F>
Eigen::MatrixXd fd_hessian(F&& f, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = detail::fd_step(x[i], 0.25);
  Eigen::MatrixXd hess(n, n);
  const double center = detail::checked_probe(f, x);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd up = x;
    Eigen::VectorXd down = x;
    up[i] += h[i];
    down[i] -= h[i];
    hess(i, i) = (detail::checked_probe(f, up) - 2.0 * center + detail::checked_probe(f, down)) / (h[i] * h[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      auto probe = [&](double si, double sj) {
        Eigen::VectorXd p = x;
        p[i] += si * h[i];
        p[j] += sj * h[j];
        return detail::checked_probe(f, p);
      };
      const double mixed = (probe(1, 1) - probe(1, -1) - probe(-1, 1) + probe(-1, -1)) / (4.0 * h[i] * h[j]);
      hess(i, j) = mixed;
      hess(j, i) = mixed;
    }
  }
  return 0.5 * (hess + hess.transpose());
}

/// Central-difference Jacobian of a vector map, step as in fd_gradient.
template <class F>
Eigen::MatrixXd fd_jacobian(F&& f, const Eigen::VectorXd& x) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = detail::fd_step(x[i], 1.0 / 3.0);
    Eigen::VectorXd up = x;
    Eigen::VectorXd down = x;
    up[i] += h;
    down[i] -= h;
    const Eigen::VectorXd fu = f(up);
    const Eigen::VectorXd fd = f(down);
    if (!fu.allFinite() || !fd.allFinite())
      throw Error(ErrorKind::NonFinite, "finite-difference probe evaluated to a non-finite value");
    jac.col(i) = (fu - fd) / (up[i] - down[i]);
  }
  return jac;
}

}  // namespace expfam::numeric
