#pragma once

// Umbrella header.

#include "spheredepth/baseline_depths.hpp"
#include "spheredepth/data_lab.hpp"
#include "spheredepth/depth_core.hpp"
#include "spheredepth/error.hpp"
#include "spheredepth/experiments.hpp"
#include "spheredepth/io.hpp"
#include "spheredepth/nelder_mead.hpp"
#include "spheredepth/parallel.hpp"
#include "spheredepth/rng.hpp"
#include "spheredepth/sample_set.hpp"
#include "spheredepth/sphere_optim.hpp"
#include "spheredepth/stats_tests.hpp"
