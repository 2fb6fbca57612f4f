#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "crpsdecomp/order.hpp"
#include "crpsdecomp/step_distribution.hpp"

// Brute-force references. None of these share code with the routines they
// are meant to check.
namespace crpsdecomp::oracle {

struct OracleConfig {
  std::size_t grid_points = 4'000'000;
  std::size_t dykstra_max_cycles = 1'000'000;
  double dykstra_tolerance = 1e-14;
  std::uint64_t seed = 20240917;
};

// Midpoint Riemann sum of (F(z) - 1{y <= z})^2 over the support and y,
// padded by one unit on both sides.
double crps_numeric(const StepDistribution& f, double y, const OracleConfig& config = {});

struct DykstraResult {
  std::vector<double> values;
  std::size_t cycles = 0;
  bool converged = false;
};

// Least-squares projection of the indicators onto
// {theta : theta_i >= theta_j whenever (i, j) is LEQ, theta_i = theta_j when EQUAL}.
DykstraResult dykstra_antitonic(std::span<const double> indicators, const OrderRelationMatrix& relations,
                                const OracleConfig& config = {});

double normal_pdf(double z);
double normal_cdf(double z);

double gaussian_crps(double mu, double sigma, double y);

}  // namespace crpsdecomp::oracle
