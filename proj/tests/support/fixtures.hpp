#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "crpsdecomp/order.hpp"
#include "crpsdecomp/step_distribution.hpp"

namespace fixtures {

using crpsdecomp::CaseCollection;
using crpsdecomp::StepDistribution;

StepDistribution discrete(std::vector<double> points, std::vector<double> masses);

// ((d1 + d2)/2, 3), ((d0 + d3)/2, 0).
CaseCollection two_atoms();

// Constant forecast (d_{-1/2} + d_{1/2})/2 with outcomes -1/6 and 1/6.
CaseCollection hersbach_counterexample();

// The sample of 30 built from three forecasts on {y1, y2, y3}.
CaseCollection three_point_sample(double y1 = 0.0, double y2 = 1.0, double y3 = 2.0);

// Uniform(-1, 0) and Uniform(0, 1) forecasts, each discretized into `atoms`
// midpoint atoms, with per_forecast outcomes at the midpoint quantiles of
// Q1(z) = 1 - z^2 and Q2(z) = z^2.
CaseCollection uniform_pair(std::size_t atoms, std::size_t per_forecast);

struct GaussianComponent {
  double weight, mu, sigma;
};

// Draws n cases: a component by weight, its Gaussian forecast discretized on
// grid_size points of mu +- 8 sigma, and an outcome from that Gaussian.
CaseCollection gaussian_mixture(const std::vector<GaussianComponent>& components, std::size_t n,
                                std::size_t grid_size, std::mt19937_64& rng);

// Step forecasts on a small integer lattice with masses in quarters, so that
// ties and stochastic orderings are common. Outcomes are mostly integers.
CaseCollection random_step_collection(std::mt19937_64& rng, std::size_t n);

StepDistribution random_step_distribution(std::mt19937_64& rng);

// Gaussian forecasts given as CDF values on a fixed grid over [-12, 12].
CaseCollection random_grid_collection(std::mt19937_64& rng, std::size_t n, std::size_t grid_points = 241);

// Random partial order on n items (with occasional Equal classes) as a
// relation matrix, built from dominance among random points in the plane.
crpsdecomp::OrderRelationMatrix random_partial_order(std::mt19937_64& rng, std::size_t n);

// n ensembles of `members` draws around random locations, outcomes near them.
CaseCollection random_ensembles(std::mt19937_64& rng, std::size_t n, std::size_t members);

}  // namespace fixtures
