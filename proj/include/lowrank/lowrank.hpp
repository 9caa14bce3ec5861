#pragma once

// Umbrella header: nuclear-norm matrix completion and decomposition, the
// spectral projection estimator, dual-certificate verification, and the
// experiment harness around them.

#include "lowrank/certificate.hpp"
#include "lowrank/completion.hpp"
#include "lowrank/config.hpp"
#include "lowrank/decomposition.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/experiments.hpp"
#include "lowrank/generators.hpp"
#include "lowrank/incoherence.hpp"
#include "lowrank/io.hpp"
#include "lowrank/mask.hpp"
#include "lowrank/matrix.hpp"
#include "lowrank/power_iteration.hpp"
#include "lowrank/report.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/sampling.hpp"
#include "lowrank/structured.hpp"
#include "lowrank/subspace.hpp"
#include "lowrank/svd.hpp"
#include "lowrank/svd_projection.hpp"
#include "lowrank/svt.hpp"
