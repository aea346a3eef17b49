#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "expfam/family_catalog.hpp"
#include "expfam/numeric/finite_difference.hpp"
#include "expfam/numeric/partition.hpp"
#include "expfam/numeric/quadrature.hpp"
#include "expfam/reference_grid.hpp"
#include "test_support.hpp"

namespace expfam {
// Keeps gtest from hex-dumping parameter structs.
inline void PrintTo(const ReferencePoint& point, std::ostream* os) { *os << point.family.name() << "(" << point.label << ")"; }
}  // namespace expfam

namespace {

using namespace expfam;

using expfam::testing::kind_of;

// mu_t column of the family table, evaluated directly from standard parameters.
Eigen::VectorXd table_mean_column(const ClosedFormFamily& family, const StandardParams& std_params) {
  Eigen::VectorXd mu(family.dimension());
  switch (family.kind()) {
    case FamilyKind::Binomial: mu << family.trials() * std::get<BinomialParams>(std_params).theta; break;
    case FamilyKind::Poisson: mu << std::get<PoissonParams>(std_params).lambda; break;
    case FamilyKind::Normal: {
      const auto p = std::get<NormalParams>(std_params);
      mu << p.mean, p.variance + p.mean * p.mean;
      break;
    }
    case FamilyKind::Gamma: {
      const auto p = std::get<ShapeScaleParams>(std_params);
      mu << p.shape * p.scale, numeric::digamma_fn(p.shape) + std::log(p.scale);
      break;
    }
    case FamilyKind::SqrtGamma: {
      const auto p = std::get<ShapeScaleParams>(std_params);
      mu << p.shape * p.scale, 0.5 * (numeric::digamma_fn(p.shape) + std::log(p.scale));
      break;
    }
  }
  return mu;
}

TEST(FamilyCatalog, SupportsMatchTable) {
  EXPECT_EQ(ClosedFormFamily::binomial(4).support().kind, SupportKind::FiniteRange);
  EXPECT_EQ(ClosedFormFamily::binomial(4).support().upper, 4);
  EXPECT_EQ(ClosedFormFamily::poisson().support().kind, SupportKind::Countable);
  EXPECT_EQ(ClosedFormFamily::normal().support().kind, SupportKind::RealLine);
  EXPECT_EQ(ClosedFormFamily::gamma().support().kind, SupportKind::PositiveReals);
  EXPECT_EQ(ClosedFormFamily::sqrt_gamma().support().kind, SupportKind::PositiveReals);
  EXPECT_TRUE(ClosedFormFamily::binomial(3).fixed_shape().has_value());
  EXPECT_FALSE(ClosedFormFamily::gamma().fixed_shape().has_value());
  EXPECT_EQ(kind_of([] { ClosedFormFamily::binomial(0); }), ErrorKind::DomainError);
  EXPECT_EQ(ClosedFormFamily::from_name("sqrtgamma").kind(), FamilyKind::SqrtGamma);
  EXPECT_EQ(kind_of([] { ClosedFormFamily::from_name("cauchy"); }), ErrorKind::Unsupported);
}

TEST(FamilyCatalog, LogBase) {
  EXPECT_EQ(log_base(ClosedFormFamily::normal(), 3.7), 0.0);
  EXPECT_NEAR(log_base(ClosedFormFamily::binomial(1), 0.0), 0.0, 1e-15);
  EXPECT_NEAR(log_base(ClosedFormFamily::binomial(10), 3.0), std::log(120.0), 1e-13);
  EXPECT_NEAR(log_base(ClosedFormFamily::poisson(), 4.0), -std::log(24.0), 1e-13);
  EXPECT_EQ(kind_of([] { log_base(ClosedFormFamily::binomial(3), 4.0); }), ErrorKind::OutOfSupport);
  EXPECT_EQ(kind_of([] { log_base(ClosedFormFamily::poisson(), 1.5); }), ErrorKind::OutOfSupport);
  EXPECT_EQ(kind_of([] { log_base(ClosedFormFamily::gamma(), 0.0); }), ErrorKind::OutOfSupport);
}

TEST(FamilyCatalog, LogPartitionExamples) {
  EXPECT_NEAR(log_partition(ClosedFormFamily::poisson(), canonical({0.0})), 1.0, 1e-15);
  EXPECT_NEAR(log_partition(ClosedFormFamily::binomial(1), canonical({0.0})), std::log(2.0), 1e-15);
  EXPECT_NEAR(log_partition(ClosedFormFamily::gamma(), canonical({-1.0 / 3.0, 1.0})), std::log(9.0), 1e-14);
  // theta^alpha Gamma(alpha) / 2 at alpha=2, theta=3.
  EXPECT_NEAR(log_partition(ClosedFormFamily::sqrt_gamma(), canonical({-1.0 / 3.0, 3.0})), std::log(4.5), 1e-14);
  EXPECT_EQ(kind_of([] { log_partition(ClosedFormFamily::normal(), canonical({0.0, 0.0})); }),
            ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { log_partition(ClosedFormFamily::gamma(), canonical({-1.0, -1.0})); }),
            ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { log_partition(ClosedFormFamily::sqrt_gamma(), canonical({0.5, 1.0})); }),
            ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { log_partition(ClosedFormFamily::poisson(), canonical({0.0, 1.0})); }),
            ErrorKind::DimensionMismatch);
}

TEST(FamilyCatalog, BinomialLogPartitionIsStableForExtremeEta) {
  const auto fam = ClosedFormFamily::binomial(1000);
  EXPECT_NEAR(log_partition(fam, canonical({800.0})), 1000.0 * 800.0, 1e-6);
  EXPECT_NEAR(log_partition(fam, canonical({-800.0})), 0.0, 1e-300);
}

TEST(FamilyCatalog, LogPdmfExamples) {
  EXPECT_NEAR(log_pdmf(ClosedFormFamily::poisson(), canonical({0.0}), 0.0), -1.0, 1e-15);
  EXPECT_NEAR(log_pdmf(ClosedFormFamily::binomial(1), canonical({0.0}), 1.0), -std::log(2.0), 1e-15);
  EXPECT_NEAR(log_pdmf(ClosedFormFamily::normal(), canonical({0.0, -0.5}), 0.0),
              -0.5 * std::log(2 * std::numbers::pi), 1e-15);
}

TEST(FamilyCatalog, CanonicalStats) {
  EXPECT_EQ(canonical_stats(ClosedFormFamily::poisson(), 4.0), Eigen::VectorXd::Constant(1, 4.0));
  const Eigen::VectorXd normal = canonical_stats(ClosedFormFamily::normal(), 2.0);
  EXPECT_EQ(normal[0], 2.0);
  EXPECT_EQ(normal[1], 4.0);
  const Eigen::VectorXd sqrt_gamma = canonical_stats(ClosedFormFamily::sqrt_gamma(), 1.0);
  EXPECT_EQ(sqrt_gamma[0], 1.0);
  EXPECT_EQ(sqrt_gamma[1], 0.0);
  const Eigen::VectorXd gamma = canonical_stats(ClosedFormFamily::gamma(), std::exp(1.0));
  EXPECT_NEAR(gamma[1], 1.0, 1e-15);
  EXPECT_EQ(kind_of([] { canonical_stats(ClosedFormFamily::sqrt_gamma(), -1.0); }), ErrorKind::OutOfSupport);
}

TEST(FamilyCatalog, MeanStatsExamples) {
  EXPECT_NEAR(mean_stats(ClosedFormFamily::poisson(), canonical({std::log(2.0)})).mu[0], 2.0, 1e-14);
  EXPECT_NEAR(mean_stats(ClosedFormFamily::binomial(10), canonical({0.0})).mu[0], 5.0, 1e-14);
  const Eigen::VectorXd g = mean_stats(ClosedFormFamily::gamma(), canonical({-1.0 / 3.0, 1.0})).mu;
  EXPECT_NEAR(g[0], 6.0, 1e-14);
  // psi(2) = 1 - Euler-Mascheroni.
  EXPECT_NEAR(g[1], 1.0 - 0.57721566490153286061 + std::log(3.0), 1e-13);
  EXPECT_NEAR(g[1], numeric::digamma_fn(2.0) + std::log(3.0), 1e-15);
}

TEST(FamilyCatalog, VarStatsExamples) {
  EXPECT_NEAR(var_stats(ClosedFormFamily::poisson(), canonical({std::log(2.0)}))(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(var_stats(ClosedFormFamily::binomial(10), canonical({0.0}))(0, 0), 2.5, 1e-14);
  const Eigen::MatrixXd v = var_stats(ClosedFormFamily::normal(), canonical({0.0, -0.5}));
  EXPECT_NEAR(v(0, 0), 1.0, 1e-8);
  // Normal moments: Cov(x, x^2) = 2 mu sigma^2, Var(x^2) = 4 mu^2 sigma^2 + 2 sigma^4.
  EXPECT_NEAR(v(0, 1), 0.0, 1e-8);
  EXPECT_NEAR(v(1, 1), 2.0, 1e-7);
  const Eigen::MatrixXd w = var_stats(ClosedFormFamily::normal(), to_canonical(ClosedFormFamily::normal(), NormalParams{1.0, 2.0}));
  EXPECT_NEAR(w(0, 0), 2.0, 1e-7);
  EXPECT_NEAR(w(0, 1), 4.0, 1e-7);
  EXPECT_NEAR(w(1, 1), 16.0, 1e-6);
}

TEST(FamilyCatalog, ParameterConversionExamples) {
  EXPECT_NEAR(to_canonical(ClosedFormFamily::binomial(5), BinomialParams{0.5}).eta[0], 0.0, 1e-16);
  const Eigen::VectorXd n = to_canonical(ClosedFormFamily::normal(), NormalParams{0.0, 1.0}).eta;
  EXPECT_EQ(n[0], 0.0);
  EXPECT_EQ(n[1], -0.5);
  const Eigen::VectorXd g = to_canonical(ClosedFormFamily::gamma(), ShapeScaleParams{2.0, 3.0}).eta;
  EXPECT_NEAR(g[0], -1.0 / 3.0, 1e-16);
  EXPECT_EQ(g[1], 1.0);
  const Eigen::VectorXd s = to_canonical(ClosedFormFamily::sqrt_gamma(), ShapeScaleParams{2.0, 3.0}).eta;
  EXPECT_EQ(s[1], 3.0);
  EXPECT_EQ(kind_of([] { to_canonical(ClosedFormFamily::binomial(2), BinomialParams{1.0}); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { to_canonical(ClosedFormFamily::poisson(), PoissonParams{0.0}); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { to_canonical(ClosedFormFamily::normal(), NormalParams{0.0, -1.0}); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { to_canonical(ClosedFormFamily::gamma(), PoissonParams{1.0}); }), ErrorKind::DimensionMismatch);
}

TEST(FamilyCatalog, ParameterBijectionRoundTrip) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  for (int trial = 0; trial < 2000; ++trial) {
    {
      const auto fam = ClosedFormFamily::binomial(1 + trial % 30);
      const double theta = 0.001 + 0.998 * unit(rng);
      const auto back = std::get<BinomialParams>(to_standard(fam, to_canonical(fam, BinomialParams{theta})));
      EXPECT_TRUE(close(back.theta, theta)) << theta;
    }
    {
      const auto fam = ClosedFormFamily::poisson();
      const double lambda = std::exp(10.0 * unit(rng) - 5.0);
      const auto back = std::get<PoissonParams>(to_standard(fam, to_canonical(fam, PoissonParams{lambda})));
      EXPECT_TRUE(close(back.lambda, lambda));
    }
    {
      const auto fam = ClosedFormFamily::normal();
      const NormalParams p{20.0 * unit(rng) - 10.0, std::exp(6.0 * unit(rng) - 3.0)};
      const auto back = std::get<NormalParams>(to_standard(fam, to_canonical(fam, p)));
      EXPECT_TRUE(close(back.mean, p.mean) && close(back.variance, p.variance));
    }
    for (auto fam : {ClosedFormFamily::gamma(), ClosedFormFamily::sqrt_gamma()}) {
      const ShapeScaleParams p{std::exp(5.0 * unit(rng) - 2.0), std::exp(5.0 * unit(rng) - 2.0)};
      const auto back = std::get<ShapeScaleParams>(to_standard(fam, to_canonical(fam, p)));
      EXPECT_TRUE(close(back.shape, p.shape) && close(back.scale, p.scale));
    }
  }
}

TEST(FamilyCatalog, EntropyClosedForm) {
  const auto fam = ClosedFormFamily::normal();
  const double unit_var = entropy_closed(fam, to_canonical(fam, NormalParams{0.0, 1.0}));
  EXPECT_NEAR(unit_var, 0.5 * (std::log(2 * std::numbers::pi) + 1.0), 1e-15);
  EXPECT_NEAR(entropy_closed(fam, to_canonical(fam, NormalParams{3.0, std::numbers::e / (2 * std::numbers::pi)})), 1.0,
              1e-15);
  EXPECT_NEAR(entropy_closed(fam, to_canonical(fam, NormalParams{0.0, 4.0})) - unit_var, std::log(2.0), 1e-15);
  EXPECT_EQ(kind_of([] { entropy_closed(ClosedFormFamily::gamma(), canonical({-1.0, 1.0})); }), ErrorKind::Unsupported);
}

class ValidationGrid : public ::testing::TestWithParam<ReferencePoint> {};

TEST_P(ValidationGrid, Normalization) {
  const auto& point = GetParam();
  const CanonicalParams eta = to_canonical(point.family, point.standard);
  double total = 0.0;
  if (point.family.support().discrete()) {
    const int upper = point.family.support().kind == SupportKind::FiniteRange ? point.family.trials() : 500;
    for (int x = 0; x <= upper; ++x) total += pdmf(point.family, eta, x);
  } else {
    auto log_p = [&](double x) { return log_pdmf(point.family, eta, x); };
    const auto r = numeric::integrate_expectation(log_p, [](double) { return 1.0; }, numeric::support_interval(point.family));
    EXPECT_TRUE(r.converged);
    total = r.value;
  }
  EXPECT_NEAR(total, 1.0, 1e-8) << point.label;
}

TEST_P(ValidationGrid, ClosedPartitionMatchesNumeric) {
  const auto& point = GetParam();
  const CanonicalParams eta = to_canonical(point.family, point.standard);
  EXPECT_NEAR(log_partition(point.family, eta), numeric::numeric_log_partition(point.family, eta), 1e-8) << point.label;
}

TEST_P(ValidationGrid, GradientIdentity) {
  const auto& point = GetParam();
  const CanonicalParams eta = to_canonical(point.family, point.standard);
  auto a = [&](const Eigen::VectorXd& e) { return log_partition(point.family, CanonicalParams{e}); };
  const Eigen::VectorXd fd = numeric::fd_gradient(a, eta.eta);
  const Eigen::VectorXd mu = mean_stats(point.family, eta).mu;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    EXPECT_NEAR(mu[i], fd[i], 1e-6 * std::max(1.0, std::abs(mu[i]))) << point.label << " i=" << i;
}

TEST_P(ValidationGrid, HessianIdentity) {
  const auto& point = GetParam();
  const CanonicalParams eta = to_canonical(point.family, point.standard);
  auto a = [&](const Eigen::VectorXd& e) { return log_partition(point.family, CanonicalParams{e}); };
  const Eigen::MatrixXd fd = numeric::fd_hessian(a, eta.eta);
  const Eigen::MatrixXd var = var_stats(point.family, eta);
  EXPECT_LE((var - fd).cwiseAbs().maxCoeff(), 1e-4 * var.cwiseAbs().maxCoeff()) << point.label;
  EXPECT_EQ(var, var.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(var);
  EXPECT_GE(eig.eigenvalues().minCoeff(), 0.0) << point.label;
}

TEST_P(ValidationGrid, MeanMapMatchesTableColumn) {
  const auto& point = GetParam();
  const Eigen::VectorXd mu = mean_stats(point.family, to_canonical(point.family, point.standard)).mu;
  const Eigen::VectorXd expected = table_mean_column(point.family, point.standard);
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    EXPECT_NEAR(mu[i], expected[i], 1e-10 * std::max(1.0, std::abs(expected[i]))) << point.label;
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, ValidationGrid, ::testing::ValuesIn(validation_grid()),
                         [](const auto& info) { return "p" + std::to_string(info.index); });

}  // namespace
