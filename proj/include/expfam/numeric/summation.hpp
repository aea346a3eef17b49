#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "expfam/error.hpp"

namespace expfam::numeric {

/// Compensated (Neumaier) sum of the terms after sorting them by value.
///
/// Sorting first makes the result a function of the multiset of terms only, so
/// any permutation of the input yields a bit-identical sum. Everything that must
/// be exactly permutation-invariant (entropies, tilts, moment sums) goes through
/// this routine.
inline double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  double carry = 0.0;
  for (double t : terms) {
    const double s = sum + t;
    if (std::abs(sum) >= std::abs(t)) {
      carry += (sum - s) + t;
    } else {
      carry += (t - s) + sum;
    }
    sum = s;
  }
  if (!std::isfinite(sum)) return sum;
  return sum + carry;
}

inline double ordered_sum(std::span<const double> terms) {
  return ordered_sum(std::vector<double>(terms.begin(), terms.end()));
}

/// log(sum_i exp(terms_i)), shifted by the maximum. Entries may be -inf.
inline double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) throw Error(ErrorKind::EmptyInput, "log_sum_exp of an empty vector");
  if (terms.size() == 1) return terms[0];
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) {
    if (std::isnan(t)) return t;
    top = std::max(top, t);
  }
  if (std::isinf(top)) return top;  // all -inf, or a +inf entry
  std::vector<double> shifted;
  shifted.reserve(terms.size());
  for (double t : terms) shifted.push_back(std::exp(t - top));
  return top + std::log(ordered_sum(std::move(shifted)));
}

inline double log_sum_exp(std::initializer_list<double> terms) {
  return log_sum_exp(std::span<const double>(terms.begin(), terms.size()));
}

}  // namespace expfam::numeric
