#pragma once

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "expfam/error.hpp"

namespace expfam::numeric {

struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_iter = 200;

  void validate() const {
    if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || (abs_tol == 0.0 && rel_tol == 0.0))
      throw Error(ErrorKind::DomainError, "tolerance needs abs_tol >= 0, rel_tol >= 0 and one of them > 0");
    if (max_iter < 1) throw Error(ErrorKind::DomainError, "tolerance needs max_iter >= 1");
  }
};

struct NewtonReport {
  Eigen::VectorXd solution;
  int iterations = 0;
  double final_grad_norm = std::numeric_limits<double>::infinity();
  double final_value = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
};

/// Hessians with condition number above this take a scaled gradient step instead.
inline constexpr double kMaxNewtonCondition = 1e12;

/// Damped Newton minimization of a convex, twice differentiable f.
///
/// Each iteration solves H d = -g and backtracks by halving until the Armijo
/// condition (constant 1e-4) holds. Probes where f is not finite count as +inf
/// and are rejected. Convergence means ||g||_2 <= abs_tol (or rel_tol * ||g0||
/// when abs_tol is zero).
template <class F, class Grad, class Hess>
NewtonReport newton_minimize(F&& f, Grad&& grad, Hess&& hess, const Eigen::VectorXd& x0,
                             const Tolerance& tol = {}) {
  tol.validate();
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 60;

  NewtonReport report;
  Eigen::VectorXd x = x0;
  double fx = f(x);
  if (!std::isfinite(fx)) throw Error(ErrorKind::DomainError, "newton_minimize: starting point outside the domain of f");

  Eigen::VectorXd g = grad(x);
  const double threshold = tol.abs_tol > 0.0 ? tol.abs_tol : tol.rel_tol * std::max(1.0, g.norm());

  for (int iter = 0;; ++iter) {
    report.final_grad_norm = g.norm();
    report.iterations = iter;
    if (report.final_grad_norm <= threshold) {
      report.converged = true;
      break;
    }
    if (iter >= tol.max_iter || !g.allFinite()) break;

    const Eigen::MatrixXd h = hess(x);
    if (!h.allFinite()) throw Error(ErrorKind::SingularHessian, "Hessian has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (h + h.transpose()));
    const double top = eig.eigenvalues().maxCoeff();
    const double bottom = eig.eigenvalues().minCoeff();
    if (!(top > 0.0)) {
      std::ostringstream msg;
      msg << "Hessian has no positive curvature (largest eigenvalue " << top << ")";
      throw Error(ErrorKind::SingularHessian, msg.str());
    }
    Eigen::VectorXd direction;
    if (bottom <= 0.0 || top / bottom > kMaxNewtonCondition) {
      direction = -g / top;
    } else {
      direction = -(eig.eigenvectors() *
                    (eig.eigenvalues().cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * g)));
    }

    const double slope = g.dot(direction);
    // Rounding slack: near the optimum the exact decrease is below the
    // resolution of f, and a Newton step should still be taken.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * (std::abs(fx) + 1.0);
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd candidate;
    double f_candidate = 0.0;
    for (int halving = 0; halving < kMaxHalvings; ++halving, step *= 0.5) {
      candidate = x + step * direction;
      f_candidate = f(candidate);
      if (std::isfinite(f_candidate) && f_candidate <= fx + kArmijo * step * slope + slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    x = candidate;
    fx = f_candidate;
    g = grad(x);
  }
  report.solution = x;
  report.final_value = fx;
  return report;
}

}  // namespace expfam::numeric
