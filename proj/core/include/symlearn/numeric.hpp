#pragma once

#include <span>

#include "symlearn/matrix.hpp"
#include "symlearn/rng.hpp"

namespace symlearn {

/// Numerically stable softmax (max-subtracted). Throws DomainError on an
/// empty input and NumericError on non-finite entries.
Vector softmax(std::span<const double> v);

/// log(sum(exp(v))), max-subtracted.
double log_sum_exp(std::span<const double> v);

/// -log(-log(u)) with u clamped to [1e-12, 1 - 1e-12].
double gumbel_from_uniform(double u);

/// Standard Gumbel(0, 1) draw.
double standard_gumbel(RngState& rng);

double dot(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> v);

}  // namespace symlearn
