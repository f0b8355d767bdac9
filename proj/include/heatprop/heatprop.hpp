#pragma once

// Umbrella header: exact propagators for the anisotropic heat equation
// with time-dependent coefficients, plus the verification toolkit.

#include "heatprop/diffusivity.hpp"
#include "heatprop/errors.hpp"
#include "heatprop/estimates.hpp"
#include "heatprop/fft.hpp"
#include "heatprop/grid.hpp"
#include "heatprop/kernel.hpp"
#include "heatprop/mollifier.hpp"
#include "heatprop/oracle.hpp"
#include "heatprop/parallel.hpp"
#include "heatprop/propagator.hpp"
#include "heatprop/quadrature.hpp"
#include "heatprop/runner.hpp"
#include "heatprop/scenario.hpp"
#include "heatprop/spd.hpp"
#include "heatprop/statistics.hpp"
#include "heatprop/veryweak.hpp"
