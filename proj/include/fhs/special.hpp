#pragma once

#include "fhs/random.hpp"

namespace fhs {

/// log Be(a, b) via log-gamma.
double log_beta_function(double a, double b);

/// log(exp(x) + exp(y)) without overflow.
double log_add_exp(double x, double y);

/// Draws from Gamma(shape, rate) restricted to (0, upper).
///
/// rate == 0 reduces to the power density shape * x^(shape-1) / upper^shape.
/// When rate * upper is small relative to shape the regularized incomplete
/// gamma underflows, so that regime uses an exact rejection sampler with a
/// tilted power-law envelope; everywhere else the draw is an inverse-CDF
/// draw through the regularized lower/upper incomplete gamma inverses.
/// upper == +inf gives an untruncated Gamma draw.
double sample_truncated_gamma(RandomStream& rng, double shape, double rate, double upper);

}  // namespace fhs
