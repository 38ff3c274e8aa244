#pragma once

// Umbrella header: Perturb-Softmax / Perturb-Argmax probability models,
// their Monte-Carlo estimators, exact oracles, structural probes, and the L1
// distribution-fitting experiment.

#include "perturbmax/core.hpp"
#include "perturbmax/estimators.hpp"
#include "perturbmax/exact.hpp"
#include "perturbmax/fitting.hpp"
#include "perturbmax/perturbation.hpp"
#include "perturbmax/probes.hpp"
#include "perturbmax/rng.hpp"
