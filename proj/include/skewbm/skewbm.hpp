#ifndef SKEWBM_SKEWBM_HPP
#define SKEWBM_SKEWBM_HPP

// Umbrella header: transition densities and exact sampling for Brownian
// motion with two semipermeable (skew) barriers, with and without drift,
// plus the independent numerical oracles used to validate them.

#include "density.hpp"
#include "oracles.hpp"
#include "params.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "special.hpp"
#include "validate.hpp"

#endif
