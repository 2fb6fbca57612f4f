#include "crpsdecomp/scoring.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace crpsdecomp {

double crps(const StepDistribution& f, double y) {
  auto x = f.support();
  auto c = f.cum_probs();
  const std::size_t m = x.size();
  CompensatedSum s;
  if (y < x[0]) s += x[0] - y;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double lo = x[k], hi = x[k + 1], p = c[k];
    const double below = p * p;
    const double above = (1.0 - p) * (1.0 - p);
    if (y <= lo)
      s += above * (hi - lo);
    else if (y >= hi)
      s += below * (hi - lo);
    else {
      s += below * (y - lo);
      s += above * (hi - y);
    }
  }
  if (y > x[m - 1]) s += y - x[m - 1];
  return s.value();
}

double crps_quantile_form(const StepDistribution& f, double y) {
  auto x = f.support();
  auto c = f.cum_probs();
  CompensatedSum s;
  double prev = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double ind = y <= x[k] ? 1.0 : 0.0;
    // integral of (1{y <= x_k} - alpha) over (prev, c_k]
    s += (x[k] - y) * (ind * (c[k] - prev) - 0.5 * (c[k] - prev) * (c[k] + prev));
    prev = c[k];
  }
  return 2.0 * s.value();
}

double brier_score(double p, int o) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(fmt::format("probability {} outside [0, 1]", p));
  if (o != 0 && o != 1) throw std::invalid_argument(fmt::format("binary outcome must be 0 or 1, got {}", o));
  return (p - o) * (p - o);
}

double quantile_score(double x, double y, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument(fmt::format("quantile level {} outside (0, 1)", alpha));
  return ((y <= x ? 1.0 : 0.0) - alpha) * (x - y);
}

double mean_crps(const CaseCollection& cases) {
  CompensatedSum s;
  for (const auto& c : cases) s += crps(c.forecast, c.outcome);
  return s.value() / static_cast<double>(cases.size());
}

StepDistribution marginal_distribution(const CaseCollection& cases) {
  auto ys = cases.outcomes();
  return make_ensemble(ys);
}

}  // namespace crpsdecomp
