#pragma once

#include "crpsdecomp/step_distribution.hpp"

namespace crpsdecomp {

// Closed form over the constant pieces of (F(z) - 1{y <= z})^2.
double crps(const StepDistribution& f, double y);

// Same score as twice the integral of quantile_score(F^{-1}(alpha), y) over
// alpha, summed exactly over the cumulative-probability segments.
double crps_quantile_form(const StepDistribution& f, double y);

double brier_score(double p, int o);

double quantile_score(double x, double y, double alpha);

double mean_crps(const CaseCollection& cases);

StepDistribution marginal_distribution(const CaseCollection& cases);

}  // namespace crpsdecomp
