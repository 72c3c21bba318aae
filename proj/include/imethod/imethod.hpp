#pragma once

#include "imethod/config.hpp"
#include "imethod/data.hpp"
#include "imethod/experiments.hpp"
#include "imethod/exponents.hpp"
#include "imethod/fitting.hpp"
#include "imethod/functionals.hpp"
#include "imethod/ground_state.hpp"
#include "imethod/integrator.hpp"
#include "imethod/operators.hpp"
#include "imethod/orbital.hpp"
#include "imethod/output.hpp"
#include "imethod/spectral.hpp"
