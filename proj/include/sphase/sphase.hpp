#pragma once

#include "sphase/core.hpp"
#include "sphase/energy.hpp"
#include "sphase/equilibria.hpp"
#include "sphase/errors.hpp"
#include "sphase/grid.hpp"
#include "sphase/oracle.hpp"
#include "sphase/quadrature.hpp"
#include "sphase/roots.hpp"
