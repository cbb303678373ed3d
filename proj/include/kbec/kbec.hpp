#pragma once

#include "kbec/analytic.hpp"
#include "kbec/bessel.hpp"
#include "kbec/errors.hpp"
#include "kbec/ladder_state.hpp"
#include "kbec/observables.hpp"
#include "kbec/prep.hpp"
#include "kbec/propagator.hpp"
#include "kbec/units.hpp"
