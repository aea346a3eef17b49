#pragma once

#include <string>
#include <vector>

#include "expfam/family_catalog.hpp"

namespace expfam {

struct ReferencePoint {
  ClosedFormFamily family;
  StandardParams standard;
  std::string label;
};

/// The per-family reference members used for the catalog's summary table:
/// binomial n=10 theta=0.3, Poisson lambda=2, normal mu=1 sigma2=2, gamma and
/// square-root gamma alpha=2 theta=3.
inline std::vector<ReferencePoint> table_reference_points() {
  return {
      {ClosedFormFamily::binomial(10), BinomialParams{0.3}, "n=10,theta=0.3"},
      {ClosedFormFamily::poisson(), PoissonParams{2.0}, "lambda=2"},
      {ClosedFormFamily::normal(), NormalParams{1.0, 2.0}, "mu=1,sigma2=2"},
      {ClosedFormFamily::gamma(), ShapeScaleParams{2.0, 3.0}, "alpha=2,theta=3"},
      {ClosedFormFamily::sqrt_gamma(), ShapeScaleParams{2.0, 3.0}, "alpha=2,theta=3"},
  };
}

/// A wider validation grid: 21 (family, parameter) points covering small and
/// large shapes, skewed binomials and off-centre normals.
inline std::vector<ReferencePoint> validation_grid() {
  std::vector<ReferencePoint> grid;
  grid.push_back({ClosedFormFamily::binomial(1), BinomialParams{0.5}, "n=1,theta=0.5"});
  grid.push_back({ClosedFormFamily::binomial(10), BinomialParams{0.3}, "n=10,theta=0.3"});
  grid.push_back({ClosedFormFamily::binomial(10), BinomialParams{0.9}, "n=10,theta=0.9"});
  grid.push_back({ClosedFormFamily::binomial(50), BinomialParams{0.05}, "n=50,theta=0.05"});
  grid.push_back({ClosedFormFamily::poisson(), PoissonParams{0.5}, "lambda=0.5"});
  grid.push_back({ClosedFormFamily::poisson(), PoissonParams{2.0}, "lambda=2"});
  grid.push_back({ClosedFormFamily::poisson(), PoissonParams{30.0}, "lambda=30"});
  grid.push_back({ClosedFormFamily::normal(), NormalParams{0.0, 1.0}, "mu=0,sigma2=1"});
  grid.push_back({ClosedFormFamily::normal(), NormalParams{1.0, 2.0}, "mu=1,sigma2=2"});
  grid.push_back({ClosedFormFamily::normal(), NormalParams{-3.0, 0.25}, "mu=-3,sigma2=0.25"});
  grid.push_back({ClosedFormFamily::normal(), NormalParams{10.0, 5.0}, "mu=10,sigma2=5"});
  grid.push_back({ClosedFormFamily::gamma(), ShapeScaleParams{2.0, 3.0}, "alpha=2,theta=3"});
  grid.push_back({ClosedFormFamily::gamma(), ShapeScaleParams{0.5, 1.0}, "alpha=0.5,theta=1"});
  grid.push_back({ClosedFormFamily::gamma(), ShapeScaleParams{5.0, 0.5}, "alpha=5,theta=0.5"});
  grid.push_back({ClosedFormFamily::gamma(), ShapeScaleParams{1.0, 2.0}, "alpha=1,theta=2"});
  grid.push_back({ClosedFormFamily::sqrt_gamma(), ShapeScaleParams{2.0, 3.0}, "alpha=2,theta=3"});
  grid.push_back({ClosedFormFamily::sqrt_gamma(), ShapeScaleParams{0.5, 1.0}, "alpha=0.5,theta=1"});
  grid.push_back({ClosedFormFamily::sqrt_gamma(), ShapeScaleParams{5.0, 0.5}, "alpha=5,theta=0.5"});
  grid.push_back({ClosedFormFamily::sqrt_gamma(), ShapeScaleParams{1.5, 2.0}, "alpha=1.5,theta=2"});
  grid.push_back({ClosedFormFamily::gamma(), ShapeScaleParams{20.0, 0.1}, "alpha=20,theta=0.1"});
  grid.push_back({ClosedFormFamily::sqrt_gamma(), ShapeScaleParams{1.0, 50.0}, "alpha=1,theta=50"});
  return grid;
}

}  // namespace expfam
