#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace crpsdecomp {

// Right-continuous CDF with finitely many jumps. The representation is
// canonical: support strictly increasing, cum_probs strictly increasing with
// the last entry exactly 1, so two distributions are equal iff their CDFs are.
class StepDistribution {
 public:
  StepDistribution(std::vector<double> support, std::vector<double> cum_probs);

  static StepDistribution point_mass(double x);

  std::span<const double> support() const { return support_; }
  std::span<const double> cum_probs() const { return cum_probs_; }
  std::size_t size() const { return support_.size(); }

  double mass(std::size_t k) const { return k == 0 ? cum_probs_[0] : cum_probs_[k] - cum_probs_[k - 1]; }
  double min() const { return support_.front(); }
  double max() const { return support_.back(); }
  double mean() const;

  // Index of the largest support point <= x, or -1 if x is left of the support.
  std::ptrdiff_t index_at(double x) const;

  friend bool operator==(const StepDistribution&, const StepDistribution&) = default;
  friend bool operator<(const StepDistribution& lhs, const StepDistribution& rhs);

 private:
  std::vector<double> support_;
  std::vector<double> cum_probs_;
};

// Sorts, merges duplicate points (or points within merge_atol of the first
// point of a run), drops relative masses below 1e-15 and normalizes.
StepDistribution make_step_distribution(std::span<const double> points, std::span<const double> masses,
                                        double merge_atol = 0.0);

// Equal-weight empirical distribution of the given members.
StepDistribution make_ensemble(std::span<const double> members);

double cdf_at(const StepDistribution& f, double x);

// Lower generalized inverse, alpha in (0, 1).
double quantile_at(const StepDistribution& f, double alpha);

struct ForecastCase {
  StepDistribution forecast;
  double outcome;
};

class CaseCollection {
 public:
  explicit CaseCollection(std::vector<ForecastCase> cases);

  std::size_t size() const { return cases_.size(); }
  const ForecastCase& operator[](std::size_t i) const { return cases_[i]; }
  auto begin() const { return cases_.begin(); }
  auto end() const { return cases_.end(); }

  std::vector<double> outcomes() const;
  double min_outcome() const;
  double max_outcome() const;

 private:
  std::vector<ForecastCase> cases_;
};

// Sum that tracks the rounding error of each addition (Neumaier).
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace crpsdecomp
