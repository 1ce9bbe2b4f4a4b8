#pragma once

#include "renyi/error.hpp"
#include "renyi/quadrature.hpp"
#include "renyi/interpolation.hpp"
#include "renyi/densities.hpp"
#include "renyi/density_spec.hpp"
#include "renyi/functionals.hpp"
#include "renyi/transforms.hpp"
#include "renyi/inequalities.hpp"
#include "renyi/verification.hpp"
