#pragma once

// Umbrella header.
#include "assignment.hpp"
#include "bundle.hpp"
#include "demand.hpp"
#include "demand_analysis.hpp"
#include "demanders.hpp"
#include "equilibrium.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "fixtures.hpp"
#include "genericity.hpp"
#include "market.hpp"
#include "matroid.hpp"
#include "rng.hpp"
#include "scalar.hpp"
#include "simplex.hpp"
#include "swap_graph.hpp"
#include "valuation.hpp"
