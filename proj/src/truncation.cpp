#include "crpsdecomp/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "crpsdecomp/scoring.hpp"

namespace crpsdecomp {

StepDistribution truncate(const StepDistribution& f, double a, double b) {
  if (!(a <= b)) throw std::invalid_argument(fmt::format("truncation interval [{}, {}] is empty", a, b));
  if (a == b) return StepDistribution::point_mass(a);
  std::vector<double> xs;
  std::vector<double> cs;
  const double ca = cdf_at(f, a);
  if (ca > 0.0) {
    xs.push_back(a);
    cs.push_back(ca);
  }
  auto x = f.support();
  auto c = f.cum_probs();
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] <= a) continue;
    if (x[k] >= b) break;
    xs.push_back(x[k]);
    cs.push_back(c[k]);
  }
  if (cs.empty() || cs.back() < 1.0) {
    xs.push_back(b);
    cs.push_back(1.0);
  }
  return StepDistribution(std::move(xs), std::move(cs));
}

CaseCollection truncate(const CaseCollection& cases, double a, double b) {
  std::vector<ForecastCase> out;
  out.reserve(cases.size());
  for (const auto& c : cases) out.push_back({truncate(c.forecast, a, b), c.outcome});
  return CaseCollection(std::move(out));
}

namespace {

double tail_error_one(const StepDistribution& f, double a, double b) {
  auto x = f.support();
  auto c = f.cum_probs();
  const std::size_t m = x.size();
  double lower = 0.0;
  double upper = 0.0;
  // Segment k is [x_k, x_{k+1}) with value c_k; the last one is unbounded with value 1.
  for (std::size_t k = 0; k < m; ++k) {
    const double lo = x[k];
    const double hi = k + 1 < m ? x[k + 1] : std::numeric_limits<double>::infinity();
    if (lo < a) lower += c[k] * c[k] * (std::min(hi, a) - lo);
    if (hi > b && k + 1 < m) upper += (1.0 - c[k]) * (1.0 - c[k]) * (hi - std::max(lo, b));
  }
  if (b < x[0]) upper += x[0] - b;
  return lower + upper;
}

}  // namespace

double tail_error(const CaseCollection& cases, double a, double b) {
  if (!(a <= b)) throw std::invalid_argument(fmt::format("truncation interval [{}, {}] is empty", a, b));
  CompensatedSum s;
  for (const auto& c : cases) s += tail_error_one(c.forecast, a, b);
  return s.value() / static_cast<double>(cases.size());
}

double default_epsilon(const CaseCollection& cases) { return mean_crps(cases) / 1000.0; }

std::pair<double, double> select_thresholds(const CaseCollection& cases, double epsilon,
                                            const ThresholdOptions& options) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("threshold tolerance must be positive");
  double a0 = cases.min_outcome();
  double b0 = cases.max_outcome();
  if (options.lower_bound) {
    if (*options.lower_bound > a0)
      throw std::invalid_argument(fmt::format("lower bound {} exceeds the smallest outcome {}", *options.lower_bound, a0));
    a0 = *options.lower_bound;
  }
  if (options.upper_bound) {
    if (*options.upper_bound < b0)
      throw std::invalid_argument(fmt::format("upper bound {} is below the largest outcome {}", *options.upper_bound, b0));
    b0 = *options.upper_bound;
  }
  if (tail_error(cases, a0, b0) < epsilon) return {a0, b0};

  double delta = (b0 - a0) / 100.0;
  if (delta == 0.0) {
    double lo = a0, hi = b0;
    for (const auto& c : cases) {
      lo = std::min(lo, c.forecast.min());
      hi = std::max(hi, c.forecast.max());
    }
    delta = (hi - lo) / 100.0;
    if (delta == 0.0) return {a0, b0};
  }
  for (std::size_t k = 1; k <= options.max_iterations; ++k) {
    const double step = static_cast<double>(k) * delta;
    const double a = options.lower_bound ? a0 : a0 - step;
    const double b = options.upper_bound ? b0 : b0 + step;
    if (tail_error(cases, a, b) < epsilon) return {a, b};
    if (options.lower_bound && options.upper_bound) break;
  }
  throw std::runtime_error(
      fmt::format("threshold selection did not reach tail error < {} within {} widenings", epsilon, options.max_iterations));
}

StepDistribution discretize_cdf(const std::function<double(double)>& evaluator, double a, double b,
                                std::size_t grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid needs at least two points");
  if (!(a < b)) throw std::invalid_argument(fmt::format("grid interval [{}, {}] is empty", a, b));
  const double h = (b - a) / static_cast<double>(grid_size - 1);
  std::vector<double> xs(grid_size);
  std::vector<double> vs(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    xs[k] = k + 1 == grid_size ? b : a + static_cast<double>(k) * h;
    vs[k] = evaluator(xs[k]);
    if (!(vs[k] >= 0.0 && vs[k] <= 1.0))
      throw std::invalid_argument(fmt::format("cdf value {} at x = {} outside [0, 1]", vs[k], xs[k]));
    if (k > 0 && vs[k] < vs[k - 1])
      throw std::invalid_argument(fmt::format("cdf decreases between x = {} ({}) and x = {} ({})", xs[k - 1],
                                              vs[k - 1], xs[k], vs[k]));
  }
  std::vector<double> pts;
  std::vector<double> ms;
  for (std::size_t k = 0; k < grid_size; ++k) {
    const double prev = k == 0 ? 0.0 : vs[k - 1];
    const double w = k + 1 == grid_size ? 1.0 - prev : vs[k] - prev;
    if (w > 0.0) {
      pts.push_back(xs[k]);
      ms.push_back(w);
    }
  }
  return make_step_distribution(pts, ms);
}

}  // namespace crpsdecomp
