#pragma once

// Sparse-plus-low-rank precision matrix estimation: alternating thresholded
// gradient descent with spectral initialization, a convex ADMM baseline,
// synthetic instance generators and an experiment harness.

#include "splr/admm.hpp"
#include "splr/errors.hpp"
#include "splr/harness.hpp"
#include "splr/init.hpp"
#include "splr/io.hpp"
#include "splr/likelihood.hpp"
#include "splr/metrics.hpp"
#include "splr/optimizer.hpp"
#include "splr/rng.hpp"
#include "splr/synth.hpp"
#include "splr/thresholding.hpp"
#include "splr/types.hpp"
