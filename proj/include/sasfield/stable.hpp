// Symmetric alpha-stable scalars.
#pragma once

#include "sasfield/rng.hpp"

namespace sasfield {

/// C_alpha = (1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2)), and 2/pi at
/// alpha = 1. A standard SaS variable X has P(X > x) ~ (C_alpha / 2) x^{-alpha}.
/// Throws DomainError unless 0 < alpha < 2.
double stable_tail_constant(double alpha);

/// One draw with characteristic function exp(-|theta|^alpha), by the
/// Chambers-Mallows-Stuck transform. Throws DomainError unless 0 < alpha < 2.
double sample_standard_sas(double alpha, RandomStream& rng);

/// Throws DomainError unless 0 < alpha < 2.
void require_stable_index(double alpha);

}  // namespace sasfield
