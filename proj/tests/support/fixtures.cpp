#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "crpsdecomp/oracles.hpp"
#include "crpsdecomp/truncation.hpp"

namespace fixtures {

using crpsdecomp::ForecastCase;

StepDistribution discrete(std::vector<double> points, std::vector<double> masses) {
  return crpsdecomp::make_step_distribution(points, masses);
}

CaseCollection two_atoms() {
  return CaseCollection({{discrete({1, 2}, {0.5, 0.5}), 3.0}, {discrete({0, 3}, {0.5, 0.5}), 0.0}});
}

CaseCollection hersbach_counterexample() {
  const auto f = discrete({-0.5, 0.5}, {0.5, 0.5});
  return CaseCollection({{f, -1.0 / 6.0}, {f, 1.0 / 6.0}});
}

CaseCollection three_point_sample(double y1, double y2, double y3) {
  const std::vector<double> ys{y1, y2, y3};
  const StepDistribution f[3] = {discrete(ys, {0.5, 0.25, 0.25}), discrete(ys, {0.25, 0.5, 0.25}),
                                 discrete(ys, {0.25, 0.25, 0.5})};
  // Occurrences of (F_i, y_k).
  const int counts[3][3] = {{5, 4, 1}, {1, 5, 4}, {4, 1, 5}};
  std::vector<ForecastCase> cases;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < counts[i][k]; ++c) cases.push_back({f[i], ys[k]});
  return CaseCollection(std::move(cases));
}

CaseCollection uniform_pair(std::size_t atoms, std::size_t per_forecast) {
  std::vector<double> p1(atoms), p2(atoms), w(atoms, 1.0 / static_cast<double>(atoms));
  for (std::size_t k = 0; k < atoms; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) / static_cast<double>(atoms);
    p1[k] = mid - 1.0;
    p2[k] = mid;
  }
  const auto f1 = discrete(p1, w);
  const auto f2 = discrete(p2, w);
  std::vector<ForecastCase> cases;
  for (std::size_t j = 0; j < per_forecast; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(per_forecast);
    cases.push_back({f1, -std::sqrt(1.0 - u)});
    cases.push_back({f2, std::sqrt(u)});
  }
  return CaseCollection(std::move(cases));
}

CaseCollection gaussian_mixture(const std::vector<GaussianComponent>& components, std::size_t n,
                                std::size_t grid_size, std::mt19937_64& rng) {
  std::vector<double> weights;
  std::vector<StepDistribution> forecasts;
  for (const auto& c : components) {
    weights.push_back(c.weight);
    forecasts.push_back(crpsdecomp::discretize_cdf(
        [&](double x) { return crpsdecomp::oracle::normal_cdf((x - c.mu) / c.sigma); }, c.mu - 8.0 * c.sigma,
        c.mu + 8.0 * c.sigma, grid_size));
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> z;
  std::vector<ForecastCase> cases;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = pick(rng);
    cases.push_back({forecasts[k], components[k].mu + components[k].sigma * z(rng)});
  }
  return CaseCollection(std::move(cases));
}

StepDistribution random_step_distribution(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4), point(-4, 4), quarter(1, 4);
  const int k = count(rng);
  std::vector<double> pts, ms;
  for (int j = 0; j < k; ++j) {
    pts.push_back(point(rng));
    ms.push_back(quarter(rng));
  }
  return crpsdecomp::make_step_distribution(pts, ms);
}

CaseCollection random_step_collection(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> outcome(-5, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<StepDistribution> pool;
  std::vector<ForecastCase> cases;
  for (std::size_t i = 0; i < n; ++i) {
    // Reuse an earlier forecast now and then so that forecast groups form.
    StepDistribution f = !pool.empty() && unit(rng) < 0.3
                             ? pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]
                             : random_step_distribution(rng);
    pool.push_back(f);
    double y = outcome(rng);
    if (unit(rng) < 0.2) y += unit(rng);
    cases.push_back({std::move(f), y});
  }
  return CaseCollection(std::move(cases));
}

CaseCollection random_grid_collection(std::mt19937_64& rng, std::size_t n, std::size_t grid_points) {
  std::uniform_real_distribution<double> mu(-3.0, 3.0), sigma(0.5, 2.0);
  std::normal_distribution<double> z;
  std::vector<ForecastCase> cases;
  const double lo = -12.0, hi = 12.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = mu(rng), s = sigma(rng);
    std::vector<double> pts, ms;
    double prev = 0.0;
    for (std::size_t k = 0; k < grid_points; ++k) {
      const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1);
      const double v = k + 1 == grid_points ? 1.0 : crpsdecomp::oracle::normal_cdf((x - m) / s);
      if (v > prev) {
        pts.push_back(x);
        ms.push_back(v - prev);
      }
      prev = v;
    }
    // Outcomes drawn from a slightly shifted and widened law.
    cases.push_back({crpsdecomp::make_step_distribution(pts, ms), m + 0.3 + 1.2 * s * z(rng)});
  }
  return CaseCollection(std::move(cases));
}

crpsdecomp::OrderRelationMatrix random_partial_order(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> coord(0, 3);
  std::vector<std::pair<int, int>> pts(n);
  for (auto& p : pts) p = {coord(rng), coord(rng)};
  crpsdecomp::OrderRelationMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto [xi, yi] = pts[i];
      const auto [xj, yj] = pts[j];
      if (xi == xj && yi == yj)
        m.set(i, j, crpsdecomp::Relation::Equal);
      else if (xi <= xj && yi <= yj)
        m.set(i, j, crpsdecomp::Relation::Leq);
      else if (xi >= xj && yi >= yj)
        m.set(i, j, crpsdecomp::Relation::Geq);
    }
  return m;
}

CaseCollection random_ensembles(std::mt19937_64& rng, std::size_t n, std::size_t members) {
  std::uniform_real_distribution<double> loc(-20.0, 20.0);
  std::normal_distribution<double> z;
  std::vector<ForecastCase> cases;
  std::vector<double> xs(members);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = loc(rng);
    for (auto& x : xs) x = m + z(rng);
    cases.push_back({crpsdecomp::make_ensemble(xs), m + 0.2 + 1.1 * z(rng)});
  }
  return CaseCollection(std::move(cases));
}

}  // namespace fixtures
