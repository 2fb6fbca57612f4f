#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>

#include "crpsdecomp/step_distribution.hpp"

namespace crpsdecomp {

struct TruncationSpec {
  double a = 0.0;
  double b = 0.0;
  double epsilon = 0.0;
  std::size_t grid_size = 5000;

  friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

// Moves the mass below a into an atom at a and the mass at or above b into an
// atom at b.
StepDistribution truncate(const StepDistribution& f, double a, double b);

CaseCollection truncate(const CaseCollection& cases, double a, double b);

// Mean over cases of the integral of F^2 below a plus (1 - F)^2 above b.
double tail_error(const CaseCollection& cases, double a, double b);

struct ThresholdOptions {
  std::optional<double> lower_bound;  // pins a, e.g. 0 for nonnegative quantities
  std::optional<double> upper_bound;
  std::size_t max_iterations = 1'000'000;
};

// Default tolerance: mean CRPS / 1000.
double default_epsilon(const CaseCollection& cases);

// Widens the outcome hull in steps of (b - a) / 100 until tail_error < epsilon.
std::pair<double, double> select_thresholds(const CaseCollection& cases, double epsilon,
                                            const ThresholdOptions& options = {});

// Atoms at the equidistant grid a = x_0 < ... < x_{N-1} = b; the first atom
// carries evaluator(a), the last one whatever is left to reach 1.
StepDistribution discretize_cdf(const std::function<double(double)>& evaluator, double a, double b,
                                std::size_t grid_size);

}  // namespace crpsdecomp
