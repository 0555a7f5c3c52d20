#pragma once

#define MCOMP_VERSION "0.1.0"

#include "mcomp/bounded_real.hpp"
#include "mcomp/bump.hpp"
#include "mcomp/criteria.hpp"
#include "mcomp/error.hpp"
#include "mcomp/ess_open.hpp"
#include "mcomp/fat_cantor.hpp"
#include "mcomp/fn_spec.hpp"
#include "mcomp/interval.hpp"
#include "mcomp/interval_set.hpp"
#include "mcomp/piecewise.hpp"
#include "mcomp/polynomial.hpp"
#include "mcomp/quotient_hull.hpp"
#include "mcomp/rat.hpp"
