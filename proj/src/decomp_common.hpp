#pragma once

#include <span>

#include "crpsdecomp/decomp.hpp"

namespace crpsdecomp::detail {

// Builds the result from S, the recalibrated mean score and UNC:
// MCB = S - recal, DSC = UNC - recal. A recalibrated score above S or UNC by
// at most the tolerance is clamped (and noted); anything larger is a bug.
DecompositionResult finalize(Method method, std::size_t n, double mean_score, double recal, double unc,
                             double extra_tolerance = 0.0);

// Sum over i < j of (y_j - y_i) for sorted values.
double pairwise_gap_sum(std::span<const double> sorted);

}  // namespace crpsdecomp::detail
