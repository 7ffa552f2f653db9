#pragma once

#include "moldsched/estimator.hpp"
#include "moldsched/fptas.hpp"
#include "moldsched/generators.hpp"
#include "moldsched/io.hpp"
#include "moldsched/job.hpp"
#include "moldsched/knapsack.hpp"
#include "moldsched/oracle.hpp"
#include "moldsched/rational.hpp"
#include "moldsched/schedule.hpp"
#include "moldsched/shelves.hpp"
#include "moldsched/solver.hpp"
