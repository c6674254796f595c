#pragma once

#include "ecpm/analytic.hpp"
#include "ecpm/discrimination.hpp"
#include "ecpm/errors.hpp"
#include "ecpm/linalg.hpp"
#include "ecpm/parallel.hpp"
#include "ecpm/quantum.hpp"
#include "ecpm/random.hpp"
#include "ecpm/scenario.hpp"
#include "ecpm/sdp.hpp"
#include "ecpm/seesaw.hpp"
