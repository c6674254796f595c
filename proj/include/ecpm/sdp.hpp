#pragma once

#include "ecpm/sdp/interior_point.hpp"
#include "ecpm/sdp/problem.hpp"
#include "ecpm/sdp/program.hpp"
#include "ecpm/sdp/solver.hpp"
