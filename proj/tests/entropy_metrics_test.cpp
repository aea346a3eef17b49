#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "expfam/entropy_metrics.hpp"
#include "test_support.hpp"

namespace {

using namespace expfam;
using expfam::testing::kind_of;
using expfam::testing::random_distribution;

constexpr double kLn2 = std::numbers::ln2;

FiniteDistribution dist(std::vector<double> p) { return FiniteDistribution::over_indices(std::move(p)); }

TEST(FiniteDistribution, RejectsInvalidInput) {
  EXPECT_EQ(kind_of([] { dist({}); }), ErrorKind::InvalidDistribution);
  EXPECT_EQ(kind_of([] { dist({0.5, 0.6}); }), ErrorKind::InvalidDistribution);
  EXPECT_EQ(kind_of([] { dist({1.5, -0.5}); }), ErrorKind::InvalidDistribution);
  EXPECT_EQ(kind_of([] { FiniteDistribution({1.0, 1.0}, {0.5, 0.5}); }), ErrorKind::InvalidDistribution);
  EXPECT_EQ(kind_of([] { FiniteDistribution({1.0}, {0.5, 0.5}); }), ErrorKind::InvalidDistribution);
  EXPECT_NO_THROW(dist({0.5, 0.5 + 5e-13}));
}

TEST(CountVector, RejectsEmptyAndNegative) {
  EXPECT_THROW(CountVector({}), Error);
  EXPECT_THROW(CountVector({0, 0}), Error);
  EXPECT_THROW(CountVector({2, -1}), Error);
  EXPECT_EQ(CountVector({3, 4}).total(), 7);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(FiniteDistribution::uniform(4)), std::log(4.0), 1e-15);
  EXPECT_EQ(entropy(dist({0.0, 1.0, 0.0})), 0.0);
  EXPECT_NEAR(entropy(dist({0.5, 0.25, 0.25}), EntropyUnits::bits()), 1.5, 1e-15);
}

TEST(Entropy, AffineUnits) {
  const auto q = dist({0.2, 0.3, 0.5});
  EXPECT_NEAR(entropy(q, {2.0, 3.0}), 2.0 * entropy(q) + 3.0, 1e-15);
  EXPECT_THROW(entropy(q, {0.0, 0.0}), Error);
  EXPECT_THROW(entropy(q, {-1.0, 0.0}), Error);
}

TEST(LogLoss, Examples) {
  const auto u = FiniteDistribution::uniform(2);
  EXPECT_NEAR(log_loss(0, u), kLn2, 1e-15);
  EXPECT_NEAR(log_loss(1, u), kLn2, 1e-15);
  EXPECT_EQ(log_loss(1, dist({0.0, 1.0})), 0.0);
  EXPECT_EQ(log_loss(0, dist({0.0, 1.0})), kInf);
  EXPECT_EQ(kind_of([&] { log_loss(2, u); }), ErrorKind::IndexOutOfRange);
}

TEST(CrossEntropy, Examples) {
  const auto q = dist({0.1, 0.2, 0.7});
  EXPECT_NEAR(cross_entropy(q, q), entropy(q), 1e-15);
  EXPECT_NEAR(cross_entropy(dist({1.0, 0.0}), FiniteDistribution::uniform(2)), kLn2, 1e-15);
  EXPECT_EQ(cross_entropy(FiniteDistribution::uniform(2), dist({1.0, 0.0})), kInf);
  EXPECT_EQ(kind_of([&] { cross_entropy(q, FiniteDistribution::uniform(2)); }), ErrorKind::SupportMismatch);
}

TEST(RelativeEntropyG, Examples) {
  const auto q = dist({0.1, 0.2, 0.7});
  EXPECT_EQ(relative_entropy_g(q, q), 0.0);
  EXPECT_NEAR(relative_entropy_g(dist({1.0, 0.0}), FiniteDistribution::uniform(2)), -kLn2, 1e-15);
  EXPECT_NEAR(relative_entropy_g(q, FiniteDistribution::uniform(3)), entropy(q) - std::log(3.0), 1e-15);
}

TEST(KlDivergence, Examples) {
  const auto q = dist({0.1, 0.2, 0.7});
  EXPECT_EQ(kl_divergence(q, q), 0.0);
  EXPECT_NEAR(kl_divergence(dist({1.0, 0.0}), FiniteDistribution::uniform(2)), kLn2, 1e-15);
  EXPECT_EQ(kl_divergence(FiniteDistribution::uniform(2), dist({1.0, 0.0})), kInf);
}

TEST(GibbsCheck, Examples) {
  const auto u = FiniteDistribution::uniform(2);
  auto r = gibbs_check(u, u);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.tight);

  const auto q = dist({0.9, 0.1});
  r = gibbs_check(q, u);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.tight);
  EXPECT_NEAR(r.gap, kl_divergence(q, u), 1e-15);
  EXPECT_NEAR(r.rhs - r.lhs, 0.9 * std::log(1.8) + 0.1 * std::log(0.2), 1e-15);

  r = gibbs_check(dist({1.0, 0.0}), dist({0.0, 1.0}));
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.rhs - r.lhs, kInf);
}

TEST(GibbsCheck, RandomPairs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 2 + trial % 9;
    const auto q = random_distribution(rng, k, true);
    const auto p = trial % 10 == 0 ? q : random_distribution(rng, k);
    const auto r = gibbs_check(q, p);
    ASSERT_TRUE(r.holds);
    EXPECT_NEAR(cross_entropy(q, p) - entropy(q), kl_divergence(q, p), 1e-12);
    EXPECT_GE(kl_divergence(q, p), 0.0);
    EXPECT_EQ(r.tight, trial % 10 == 0);
    EXPECT_EQ(relative_entropy_g(q, p), -kl_divergence(q, p));
  }
}

TEST(RelativeEntropyG, ExactPermutationInvariance) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + trial % 12;
    const auto q = random_distribution(rng, k, true);
    const auto p = random_distribution(rng, k);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> qp(k), pp(k);
    for (std::size_t i = 0; i < k; ++i) {
      qp[i] = q[perm[i]];
      pp[i] = p[perm[i]];
    }
    ASSERT_EQ(relative_entropy_g(dist(qp), dist(pp)), relative_entropy_g(q, p));
    ASSERT_EQ(entropy(dist(qp)), entropy(q));
  }
}

TEST(EntropyUnits, BitsTimesLog2IsNats) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto q = random_distribution(rng, 2 + trial % 7);
    const auto p = random_distribution(rng, q.size());
    EXPECT_NEAR(entropy(q, EntropyUnits::bits()) * kLn2, entropy(q), 1e-12);
    EXPECT_EQ(relative_entropy_g(q, p, {1.0, 0.0}), relative_entropy_g(q, p, {1.0, 17.5}));
  }
}

TEST(Combinatorics, LogMultiplicityExamples) {
  EXPECT_NEAR(log_multiplicity(CountVector({2, 2})), std::log(6.0), 1e-15);
  EXPECT_EQ(log_multiplicity(CountVector({9, 0, 0})), 0.0);
  EXPECT_NEAR(log_multiplicity(CountVector({1, 1, 1})), std::log(6.0), 1e-15);
  // Large n against lgamma.
  EXPECT_NEAR(log_multiplicity(CountVector({4000, 6000})),
              std::lgamma(10001.0) - std::lgamma(4001.0) - std::lgamma(6001.0), 1e-9);
}

TEST(Combinatorics, MacrostateProbExamples) {
  const auto half = FiniteDistribution::uniform(2);
  EXPECT_NEAR(log_macrostate_prob(CountVector({1, 1}), half), std::log(0.5), 1e-15);
  EXPECT_EQ(log_macrostate_prob(CountVector({5}), dist({1.0})), 0.0);
  EXPECT_NEAR(log_macrostate_prob(CountVector({2, 2}), half), std::log(6.0 / 16.0), 1e-15);
  EXPECT_EQ(log_macrostate_prob(CountVector({1, 1}), dist({1.0, 0.0})), -kInf);
  EXPECT_EQ(kind_of([&] { log_macrostate_prob(CountVector({1, 1, 1}), half); }), ErrorKind::SupportMismatch);
}

TEST(Combinatorics, MacrostateProbabilitiesSumToOne) {
  // Multinomial pmf over all compositions of n = 6 into 3 classes.
  const auto p = dist({0.2, 0.5, 0.3});
  double total = 0.0;
  for (long a = 0; a <= 6; ++a)
    for (long b = 0; a + b <= 6; ++b) total += std::exp(log_macrostate_prob(CountVector({a, b, 6 - a - b}), p));
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Combinatorics, RateGapExamples) {
  EXPECT_NEAR(entropy_rate_gap(CountVector({1, 1})), 0.5 * kLn2 - kLn2, 1e-15);
  EXPECT_LT(std::abs(entropy_rate_gap(CountVector({10, 10}))), std::abs(entropy_rate_gap(CountVector({1, 1}))));
  // With p = q_hat: log P / n = log W / n + sum q log q and G(q_hat, q_hat) = 0.
  const CountVector d({3, 5, 2});
  const auto q_hat = dist({0.3, 0.5, 0.2});
  const double expected = log_multiplicity(d) / 10.0 + 0.3 * std::log(0.3) + 0.5 * std::log(0.5) + 0.2 * std::log(0.2);
  EXPECT_NEAR(g_rate_gap(d, q_hat), expected, 1e-14);
  EXPECT_NEAR(g_rate_gap(d, q_hat), entropy_rate_gap(d), 1e-14);
  EXPECT_EQ(kind_of([&] { g_rate_gap(CountVector({1, 1}), dist({1.0, 0.0})); }), ErrorKind::ImpossibleMacrostate);
}

TEST(Combinatorics, GapsShrinkWithinBound) {
  double previous_h = kInf;
  double previous_g = kInf;
  const auto p = dist({0.3, 0.7});
  for (long n : {100L, 1000L, 10000L}) {
    const CountVector d({n / 2, n / 2});
    const double bound = (std::log(static_cast<double>(n)) + 1.0) / static_cast<double>(n);
    const double h_gap = std::abs(entropy_rate_gap(d));
    const double g_gap = std::abs(g_rate_gap(d, p));
    EXPECT_LT(h_gap, previous_h);
    EXPECT_LT(g_gap, previous_g);
    EXPECT_LE(h_gap, bound);
    EXPECT_LE(g_gap, bound);
    previous_h = h_gap;
    previous_g = g_gap;
  }
}

TEST(Mixture, Examples) {
  const auto q0 = dist({0.2, 0.8});
  const auto q1 = dist({0.6, 0.4});
  EXPECT_EQ(mixture(q0, q1, 0.0).probs(), q0.probs());
  EXPECT_EQ(mixture(q0, q1, 1.0).probs(), q1.probs());
  EXPECT_EQ(mixture(dist({1.0, 0.0}), dist({0.0, 1.0}), 0.5).probs(), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(kind_of([&] { mixture(q0, FiniteDistribution::uniform(3), 0.5); }), ErrorKind::SupportMismatch);
  EXPECT_EQ(kind_of([&] { mixture(q0, q1, 1.5); }), ErrorKind::DomainError);
}

TEST(Concavity, Examples) {
  const auto q = dist({0.2, 0.8});
  auto r = concavity_witness(q, q, 0.3);
  EXPECT_FALSE(r.strict);
  EXPECT_NEAR(r.lhs, r.rhs, 1e-15);

  r = concavity_witness(dist({1.0, 0.0}), dist({0.0, 1.0}), 0.5);
  EXPECT_TRUE(r.strict);
  EXPECT_NEAR(r.lhs, kLn2, 1e-15);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_FALSE(r.g_lhs.has_value());

  EXPECT_EQ(kind_of([&] { concavity_witness(q, q, 0.0); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([&] { concavity_witness(q, q, 1.0); }), ErrorKind::DomainError);
}

TEST(Concavity, RandomTriples) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + trial % 8;
    const auto q0 = random_distribution(rng, k, true);
    auto q1 = random_distribution(rng, k, true);
    while (same_distribution(q0, q1)) q1 = random_distribution(rng, k, true);
    const auto p = random_distribution(rng, k);
    double lambda = unit(rng);
    while (lambda == 0.0) lambda = unit(rng);
    const auto r = concavity_witness(q0, q1, lambda, p);
    ASSERT_TRUE(r.strict);
    EXPECT_GT(r.lhs, r.rhs);
    ASSERT_TRUE(r.g_lhs && r.g_rhs);
    EXPECT_GT(*r.g_lhs, *r.g_rhs);
    EXPECT_NEAR(r.risk_lhs, r.risk_rhs, 1e-12 * std::max(1.0, std::abs(r.risk_lhs)));
  }
}

}  // namespace
