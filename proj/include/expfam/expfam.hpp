#pragma once

#include "expfam/entropy_metrics.hpp"
#include "expfam/error.hpp"
#include "expfam/family_catalog.hpp"
#include "expfam/maxent_engine.hpp"
#include "expfam/numeric/finite_difference.hpp"
#include "expfam/numeric/newton.hpp"
#include "expfam/numeric/partition.hpp"
#include "expfam/numeric/quadrature.hpp"
#include "expfam/numeric/special_functions.hpp"
#include "expfam/numeric/summation.hpp"
#include "expfam/reference_grid.hpp"
#include "expfam/variable_transforms.hpp"
