#pragma once

#include "corank/assignment.hpp"
#include "corank/data_io.hpp"
#include "corank/efficiency.hpp"
#include "corank/grid.hpp"
#include "corank/konijn.hpp"
#include "corank/nulldist.hpp"
#include "corank/power_study.hpp"
#include "corank/rng.hpp"
#include "corank/scores.hpp"
#include "corank/special_functions.hpp"
#include "corank/stats.hpp"
#include "corank/transport.hpp"
