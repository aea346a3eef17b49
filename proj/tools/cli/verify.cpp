#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "cli.hpp"
#include "expfam/entropy_metrics.hpp"
#include "expfam/numeric/finite_difference.hpp"
#include "expfam/numeric/partition.hpp"
#include "expfam/reference_grid.hpp"
#include "expfam/variable_transforms.hpp"

namespace expfam::cli {

namespace {

constexpr int kPropositionProblems = 20;

[[noreturn]] void violated(const std::string& relation, std::vector<double> witness, const std::string& what) {
  throw InvariantViolation(relation, std::move(witness), what);
}

FiniteDistribution random_simplex_point(std::mt19937_64& rng, std::size_t k) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (double& v : w) total += (v = expo(rng));
  // Occasionally drop a coordinate so boundary points are exercised too.
  if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) {
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    total -= w[i];
    w[i] = 0.0;
  }
  for (double& v : w) v /= total;
  return FiniteDistribution::over_indices(std::move(w));
}

void proposition_suite(bool uniform, std::uint64_t seed, int trials, std::ostream& out) {
  std::mt19937_64 rng(seed);
  double min_gap = std::numeric_limits<double>::infinity();
  double max_identity = 0.0;
  for (int i = 0; i < kPropositionProblems; ++i) {
    const Eigen::Index k = 3 + i % 10;
    const Eigen::Index d = k >= 4 ? 1 + i / 10 : 1;
    const std::uint64_t problem_seed = rng();
    const std::uint64_t trial_seed = rng();
    const MomentProblem problem = random_moment_problem(problem_seed, k, d, uniform);
    const VerificationReport r =
        uniform ? verify_prop2(problem, trials, trial_seed) : verify_prop1(problem, trials, trial_seed);
    out << fmt::format("problem {:02d}: K={} d={} min_gap={} max_identity_error={}", i + 1, k, d,
                       r.min_gap ? format_double(*r.min_gap) : "none", format_double(r.max_identity_error));
    if (!uniform) out << " max_kl_error=" << format_double(r.max_kl_error);
    out << "\n";
    if (r.min_gap) min_gap = std::min(min_gap, *r.min_gap);
    max_identity = std::max(max_identity, r.max_identity_error);
  }
  out << "min_gap: " << (std::isinf(min_gap) ? "none" : format_double(min_gap)) << "\n";
  out << "max_identity_error: " << format_double(max_identity) << "\n";
}

void concavity_suite(std::uint64_t seed, int trials, std::ostream& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double min_h = std::numeric_limits<double>::infinity();
  double min_g = std::numeric_limits<double>::infinity();
  double max_risk = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const FiniteDistribution q0 = random_simplex_point(rng, k);
    FiniteDistribution q1 = random_simplex_point(rng, k);
    while (same_distribution(q0, q1)) q1 = random_simplex_point(rng, k);
    std::vector<double> pw(k);
    std::exponential_distribution<double> expo(1.0);
    double total = 0.0;
    for (double& v : pw) total += (v = expo(rng));
    for (double& v : pw) v /= total;
    const FiniteDistribution p = FiniteDistribution::over_indices(pw);
    double lambda = unit(rng);
    while (lambda == 0.0) lambda = unit(rng);
    const ConcavityReport r = concavity_witness(q0, q1, lambda, p);
    min_h = std::min(min_h, r.lhs - r.rhs);
    if (std::isfinite(*r.g_rhs)) min_g = std::min(min_g, *r.g_lhs - *r.g_rhs);
    max_risk = std::max(max_risk, std::abs(r.risk_lhs - r.risk_rhs));
  }
  out << "min_h_margin: " << format_double(min_h) << "\n";
  out << "min_g_margin: " << format_double(min_g) << "\n";
  out << "max_risk_identity_error: " << format_double(max_risk) << "\n";
}

void combinatorial_suite(std::ostream& out) {
  const FiniteDistribution p = FiniteDistribution::over_indices({0.3, 0.7});
  double previous_h = std::numeric_limits<double>::infinity();
  double previous_g = std::numeric_limits<double>::infinity();
  for (long n : {100L, 1000L, 10000L}) {
    const CountVector d({n / 2, n - n / 2});
    const double h_gap = std::abs(entropy_rate_gap(d));
    const double g_gap = std::abs(g_rate_gap(d, p));
    const double bound = (std::log(static_cast<double>(n)) + 1.0) / static_cast<double>(n);
    out << fmt::format("n={}: entropy_gap={} g_gap={} bound={}\n", n, format_double(h_gap), format_double(g_gap),
                       format_double(bound));
    const std::vector<double> witness = {static_cast<double>(n), h_gap, g_gap, bound};
    if (!(h_gap < previous_h) || !(g_gap < previous_g))
      violated("combinatorial-decrease", witness, "rate gap did not shrink with n");
    if (h_gap > bound || g_gap > bound) violated("combinatorial-bound", witness, "rate gap exceeds (log n + 1)/n");
    previous_h = h_gap;
    previous_g = g_gap;
  }
}

void table2_suite(std::ostream& out) {
  double max_a = 0.0, max_mu = 0.0, max_var = 0.0;
  for (const ReferencePoint& point : validation_grid()) {
    const ClosedFormFamily& family = point.family;
    const CanonicalParams eta = to_canonical(family, point.standard);
    auto a = [&](const Eigen::VectorXd& e) { return log_partition(family, CanonicalParams{e}); };
    const double a_err = std::abs(log_partition(family, eta) - numeric::numeric_log_partition(family, eta));
    const Eigen::VectorXd mu = mean_stats(family, eta).mu;
    const Eigen::VectorXd fd = numeric::fd_gradient(a, eta.eta);
    const double mu_err = ((fd - mu).array().abs() / mu.array().abs().max(1e-300)).maxCoeff();
    const Eigen::MatrixXd var = var_stats(family, eta);
    const Eigen::MatrixXd hess = numeric::fd_hessian(a, eta.eta);
    const double var_err = (var - hess).cwiseAbs().maxCoeff() / var.cwiseAbs().maxCoeff();
    out << fmt::format("{} {}: a_abs_err={} mu_rel_err={} var_rel_err={}\n", family.name(), point.label,
                       format_double(a_err), format_double(mu_err), format_double(var_err));
    std::vector<double> witness(eta.eta.data(), eta.eta.data() + eta.eta.size());
    if (a_err > 1e-8) violated("table2-partition", witness, "closed-form and numeric log-partition disagree");
    if (mu_err > 1e-6) violated("table2-mean", witness, "mean map differs from the gradient of a");
    if (var_err > 1e-4) violated("table2-variance", witness, "variance differs from the Hessian of a");
    max_a = std::max(max_a, a_err);
    max_mu = std::max(max_mu, mu_err);
    max_var = std::max(max_var, var_err);
  }
  out << "max_a_abs_err: " << format_double(max_a) << "\n";
  out << "max_mu_rel_err: " << format_double(max_mu) << "\n";
  out << "max_var_rel_err: " << format_double(max_var) << "\n";
}

void transforms_suite(std::ostream& out) {
  const ClosedFormFamily gamma = ClosedFormFamily::gamma();
  const ClosedFormFamily sqrt_gamma = ClosedFormFamily::sqrt_gamma();
  const ClosedFormFamily normal = ClosedFormFamily::normal();
  double max_density = 0.0;
  double max_residual = 0.0;
  for (double alpha : {0.5, 1.0, 2.0, 5.0}) {
    for (double theta : {0.5, 1.0, 3.0}) {
      const CanonicalParams g_eta = to_canonical(gamma, ShapeScaleParams{alpha, theta});
      const CanonicalParams s_eta = to_canonical(sqrt_gamma, ShapeScaleParams{alpha, theta});
      auto log_pdf = [&](double x) { return log_pdmf(gamma, g_eta, x); };
      for (int i = 1; i <= 200; ++i) {
        const double y = 0.03 * i;
        max_density = std::max(max_density, std::abs(transform_density(log_pdf, MonotoneMap::sqrt(), y) -
                                                      log_pdmf(sqrt_gamma, s_eta, y)));
      }
      max_residual = std::max(max_residual, check_efu_closure(MonotoneMap::sqrt(), gamma, g_eta).residual);
    }
  }
  const CanonicalParams unit = to_canonical(normal, NormalParams{0.0, 1.0});
  const EntropyShiftReport shift = demo_h_noninvariance(normal, unit, MonotoneMap::affine(2.0));
  const double entropy_err = std::abs(shift.h_before - entropy_closed(normal, unit));
  const double delta_err = std::abs(shift.delta - std::log(2.0));
  const double cube_residual = check_efu_closure(MonotoneMap::cube(), normal, unit).residual;
  out << "max_sqrt_gamma_density_err: " << format_double(max_density) << "\n";
  out << "max_closure_residual: " << format_double(max_residual) << "\n";
  out << "normal_cube_closure_residual: " << format_double(cube_residual) << "\n";
  out << "normal_entropy_err: " << format_double(entropy_err) << "\n";
  out << "scale_delta_err: " << format_double(delta_err) << "\n";
  if (max_density > 1e-9) violated("sqrt-gamma-density", {max_density}, "transformed gamma differs from sqrt-gamma");
  if (max_residual >= kClosureTolerance) violated("efu-closure", {max_residual}, "gamma/sqrt closure residual too large");
  if (cube_residual < kClosureTolerance) violated("efu-closure-negative", {cube_residual}, "normal/cube reported closed");
  if (entropy_err > 1e-7) violated("normal-entropy", {entropy_err}, "normal entropy formula differs from quadrature");
  if (delta_err > 1e-6) violated("scale-delta", {delta_err}, "entropy shift under y = 2x differs from log 2");
}

}  // namespace

int run_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&] {
    const int trials = args.trials.value_or(1000);
    if (trials < 0) throw MalformedInput("--trials: must be >= 0");
    std::ostringstream body;
    body << "suite: " << args.suite << "\n";
    body << "seed: " << args.seed << "\n";
    body << "trials: " << trials << "\n";
    if (args.suite == "prop1") {
      proposition_suite(false, args.seed, trials, body);
    } else if (args.suite == "prop2") {
      proposition_suite(true, args.seed, trials, body);
    } else if (args.suite == "concavity") {
      concavity_suite(args.seed, trials, body);
    } else if (args.suite == "combinatorial") {
      combinatorial_suite(body);
    } else if (args.suite == "table2") {
      table2_suite(body);
    } else if (args.suite == "transforms") {
      transforms_suite(body);
    } else {
      throw MalformedInput(fmt::format("suite: unknown suite '{}'", args.suite));
    }
    body << "status: all hold\n";
    out << body.str();
    return static_cast<int>(kOk);
  });
}

}  // namespace expfam::cli
