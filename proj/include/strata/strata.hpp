// strata.hpp - umbrella header (everything except JSON serialisation).
#pragma once

#include "strata/allocator.hpp"
#include "strata/errors.hpp"
#include "strata/estimator.hpp"
#include "strata/hypergeom.hpp"
#include "strata/montecarlo.hpp"
#include "strata/population.hpp"
#include "strata/random.hpp"
#include "strata/tables.hpp"
#include "strata/variance.hpp"
