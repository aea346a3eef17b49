// Tour of the library: a catalog family, entropy, and a maxent fit.

#include <cstdio>

#include "expfam/expfam.hpp"

int main() {
  using namespace expfam;

  // Gamma(alpha=2, theta=3) in canonical form and its mean parameters.
  const ClosedFormFamily gamma = ClosedFormFamily::gamma();
  const CanonicalParams eta = to_canonical(gamma, ShapeScaleParams{2.0, 3.0});
  const Eigen::VectorXd mu = mean_stats(gamma, eta).mu;
  std::printf("gamma: eta = (%.6f, %.6f)  a(eta) = %.6f  E[x] = %.6f  E[log x] = %.6f\n", eta.eta[0], eta.eta[1],
              log_partition(gamma, eta), mu[0], mu[1]);

  // Entropy and Gibbs on a small pair.
  const auto q = FiniteDistribution::over_indices({0.5, 0.3, 0.2});
  const auto p = FiniteDistribution::uniform(3);
  const GibbsReport gibbs = gibbs_check(q, p);
  std::printf("H(Q) = %.6f nats, H(Q,P) = %.6f, KL = %.6f\n", gibbs.lhs, gibbs.rhs, gibbs.gap);

  // A die whose mean is 4.5 instead of 3.5: maximum entropy picks a geometric tilt.
  Eigen::MatrixXd stats(6, 1);
  for (int i = 0; i < 6; ++i) stats(i, 0) = i + 1;
  Eigen::VectorXd target(1);
  target << 4.5;
  const MomentProblem die({1, 2, 3, 4, 5, 6}, Eigen::VectorXd::Zero(6), stats, target);
  const MaxEntSolution sol = solve_dual(die);
  std::printf("die: eta = %.6f, probabilities:", sol.eta[0]);
  for (double v : sol.dist.probs()) std::printf(" %.4f", v);
  std::printf("\nentropy = %.6f nats (uniform would be %.6f)\n", entropy(sol.dist),
              entropy(FiniteDistribution::uniform(6)));
  return 0;
}
