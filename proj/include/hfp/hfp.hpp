#pragma once

#include "hfp/core.hpp"
#include "hfp/geometry.hpp"
#include "hfp/operators.hpp"
#include "hfp/fixtures.hpp"
#include "hfp/schedules.hpp"
#include "hfp/solver.hpp"
#include "hfp/trace_csv.hpp"
#include "hfp/problem_file.hpp"
