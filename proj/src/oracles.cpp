#include "crpsdecomp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace crpsdecomp::oracle {

double crps_numeric(const StepDistribution& f, double y, const OracleConfig& config) {
  if (config.grid_points < 10'000) throw std::invalid_argument("numeric CRPS needs at least 10^4 grid points");
  auto x = f.support();
  auto c = f.cum_probs();
  const double lo = std::min(x.front(), y) - 1.0;
  const double hi = std::max(x.back(), y) + 1.0;
  const std::size_t n = config.grid_points;
  const double h = (hi - lo) / static_cast<double>(n);
  long double acc = 0.0L;
  std::size_t k = 0;
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = lo + (static_cast<double>(i) + 0.5) * h;
    while (k < x.size() && x[k] <= z) value = c[k++];
    const double d = value - (y <= z ? 1.0 : 0.0);
    acc += static_cast<long double>(d * d);
  }
  return static_cast<double>(acc * h);
}

DykstraResult dykstra_antitonic(std::span<const double> indicators, const OrderRelationMatrix& relations,
                                const OracleConfig& config) {
  const std::size_t n = indicators.size();
  if (relations.size() != n)
    throw std::invalid_argument(fmt::format("{} indicators but relation matrix of size {}", n, relations.size()));
  // Half-space theta[hi] >= theta[lo].
  struct Constraint {
    std::size_t hi, lo;
    double p_hi = 0.0, p_lo = 0.0;
  };
  std::vector<Constraint> cons;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Relation r = relations(i, j);
      if (r == Relation::Leq) cons.push_back({i, j});
      if (r == Relation::Equal && i < j) {
        cons.push_back({i, j});
        cons.push_back({j, i});
      }
    }
  DykstraResult res;
  res.values.assign(indicators.begin(), indicators.end());
  auto& t = res.values;
  for (res.cycles = 1; res.cycles <= config.dykstra_max_cycles; ++res.cycles) {
    double change = 0.0;
    for (auto& con : cons) {
      const double yh = t[con.hi] + con.p_hi;
      const double yl = t[con.lo] + con.p_lo;
      double nh = yh, nl = yl;
      if (yh < yl) nh = nl = 0.5 * (yh + yl);
      con.p_hi = yh - nh;
      con.p_lo = yl - nl;
      change = std::max({change, std::abs(nh - t[con.hi]), std::abs(nl - t[con.lo])});
      t[con.hi] = nh;
      t[con.lo] = nl;
    }
    if (change <= config.dykstra_tolerance) {
      res.converged = true;
      return res;
    }
  }
  res.cycles = config.dykstra_max_cycles;
  return res;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double gaussian_crps(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) throw std::invalid_argument(fmt::format("standard deviation {} is not positive", sigma));
  const double z = (y - mu) / sigma;
  return sigma * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - 1.0 / std::sqrt(std::numbers::pi));
}

}  // namespace crpsdecomp::oracle
