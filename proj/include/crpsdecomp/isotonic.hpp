#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crpsdecomp/order.hpp"
#include "crpsdecomp/step_distribution.hpp"

namespace crpsdecomp {

struct PavBlock {
  std::size_t first;  // positions in key order, half-open
  std::size_t last;
  double value;
};

struct PavFit {
  std::vector<double> fitted;      // aligned with the input
  std::vector<std::size_t> order;  // input indices sorted by key (stable)
  std::vector<PavBlock> blocks;
};

// Least-squares nondecreasing fit in key order; equal keys share a block.
// Weights default to 1.
PavFit pav_mean(std::span<const double> values, std::span<const double> keys,
                std::span<const double> weights = {});

// Nondecreasing fit in key order whose block values are the lower empirical
// alpha-quantiles of the block members.
PavFit pav_quantile(std::span<const double> values, std::span<const double> keys, double alpha);

// Least-squares fit with theta_i >= theta_j whenever (i, j) is LEQ and
// theta_i = theta_j whenever (i, j) is EQUAL.
std::vector<double> antitonic_binary_fit(std::span<const double> indicators, const OrderRelationMatrix& relations);

class IdrFit {
 public:
  IdrFit(std::vector<double> thresholds, std::vector<StepDistribution> distinct, std::vector<std::size_t> case_index,
         OrderRelationMatrix relations);

  std::size_t size() const { return case_index_.size(); }
  const StepDistribution& fitted(std::size_t i) const { return distinct_[case_index_[i]]; }
  const std::vector<double>& thresholds() const { return thresholds_; }
  const OrderRelationMatrix& relations() const { return relations_; }

 private:
  std::vector<double> thresholds_;
  std::vector<StepDistribution> distinct_;
  std::vector<std::size_t> case_index_;
  OrderRelationMatrix relations_;
};

IdrFit idr_fit(const CaseCollection& cases, const OrderRelationMatrix& relations);

}  // namespace crpsdecomp
