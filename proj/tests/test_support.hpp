#pragma once

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "expfam/entropy_metrics.hpp"
#include "expfam/error.hpp"

namespace expfam {
inline void PrintTo(ErrorKind kind, std::ostream* os) { *os << to_string(kind); }
}  // namespace expfam

namespace expfam::testing {

inline ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an expfam::Error";
  return ErrorKind::Unsupported;
}

// Dirichlet(1, ..., 1) draw; optionally zeroes a random coordinate.
inline FiniteDistribution random_distribution(std::mt19937_64& rng, std::size_t k, bool allow_zero = false) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  for (double& v : w) v = expo(rng);
  if (allow_zero && k > 1 && std::uniform_int_distribution<int>(0, 3)(rng) == 0)
    w[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)] = 0.0;
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  return FiniteDistribution::over_indices(std::move(w));
}

}  // namespace expfam::testing
