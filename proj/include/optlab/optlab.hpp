#pragma once

#include "optlab/branch_and_bound.hpp"
#include "optlab/ilp_core.hpp"
#include "optlab/lp_io.hpp"
#include "optlab/puzzle_models.hpp"
#include "optlab/simplex.hpp"
#include "optlab/tsp_art.hpp"
