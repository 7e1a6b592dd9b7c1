#pragma once

#include "optlab/puzzles/common.hpp"
#include "optlab/puzzles/knapsack.hpp"
#include "optlab/puzzles/queens.hpp"
#include "optlab/puzzles/shortest_path.hpp"
#include "optlab/puzzles/sudoku.hpp"
#include "optlab/puzzles/tiling.hpp"
#include "optlab/puzzles/tour.hpp"
