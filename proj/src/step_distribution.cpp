#include "crpsdecomp/step_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace crpsdecomp {

StepDistribution::StepDistribution(std::vector<double> support, std::vector<double> cum_probs)
    : support_(std::move(support)), cum_probs_(std::move(cum_probs)) {
  if (support_.empty()) throw std::invalid_argument("step distribution needs at least one support point");
  if (support_.size() != cum_probs_.size())
    throw std::invalid_argument(
        fmt::format("support has {} points but cum_probs has {}", support_.size(), cum_probs_.size()));
  for (std::size_t k = 0; k < support_.size(); ++k) {
    if (!std::isfinite(support_[k])) throw std::invalid_argument(fmt::format("support[{}] is not finite", k));
    if (!(cum_probs_[k] > 0.0 && cum_probs_[k] <= 1.0))
      throw std::invalid_argument(fmt::format("cum_probs[{}] = {} outside (0, 1]", k, cum_probs_[k]));
    if (k > 0 && !(support_[k] > support_[k - 1]))
      throw std::invalid_argument(fmt::format("support not strictly increasing at index {}", k));
    if (k > 0 && !(cum_probs_[k] > cum_probs_[k - 1]))
      throw std::invalid_argument(fmt::format("cum_probs not strictly increasing at index {}", k));
  }
  if (cum_probs_.back() != 1.0)
    throw std::invalid_argument(fmt::format("final cumulative probability is {}, expected 1", cum_probs_.back()));
}

StepDistribution StepDistribution::point_mass(double x) { return StepDistribution({x}, {1.0}); }

double StepDistribution::mean() const {
  CompensatedSum s;
  for (std::size_t k = 0; k < size(); ++k) s += support_[k] * mass(k);
  return s.value();
}

std::ptrdiff_t StepDistribution::index_at(double x) const {
  auto it = std::upper_bound(support_.begin(), support_.end(), x);
  return std::distance(support_.begin(), it) - 1;
}

bool operator<(const StepDistribution& lhs, const StepDistribution& rhs) {
  if (lhs.support_ != rhs.support_) return lhs.support_ < rhs.support_;
  return lhs.cum_probs_ < rhs.cum_probs_;
}

StepDistribution make_step_distribution(std::span<const double> points, std::span<const double> masses,
                                        double merge_atol) {
  if (points.empty()) throw std::invalid_argument("empty point list");
  if (points.size() != masses.size())
    throw std::invalid_argument(fmt::format("{} points but {} masses", points.size(), masses.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!std::isfinite(points[k])) throw std::invalid_argument(fmt::format("point {} is not finite", k));
    if (!std::isfinite(masses[k]) || !(masses[k] > 0.0))
      throw std::invalid_argument(fmt::format("mass {} = {} is not positive and finite", k, masses[k]));
  }
  if (!(merge_atol >= 0.0)) throw std::invalid_argument("merge tolerance must be nonnegative");

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

  std::vector<double> xs;
  std::vector<double> ws;
  for (std::size_t idx : order) {
    if (!xs.empty() && points[idx] - xs.back() <= merge_atol) {
      ws.back() += masses[idx];
    } else {
      xs.push_back(points[idx]);
      ws.push_back(masses[idx]);
    }
  }

  double total = 0.0;
  for (double w : ws) total += w;
  std::vector<double> support;
  std::vector<double> kept;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (ws[k] / total < 1e-15) continue;
    support.push_back(xs[k]);
    kept.push_back(ws[k]);
  }
  if (support.empty()) throw std::invalid_argument("all masses vanish after normalization");

  // Running raw sums divided by the total keep k/m exact for equal weights.
  double kept_total = 0.0;
  for (double w : kept) kept_total += w;
  std::vector<double> cum(kept.size());
  double running = 0.0;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    running += kept[k];
    cum[k] = std::min(running / kept_total, 1.0);
  }
  cum.back() = 1.0;
  return StepDistribution(std::move(support), std::move(cum));
}

StepDistribution make_ensemble(std::span<const double> members) {
  if (members.empty()) throw std::invalid_argument("empty ensemble");
  std::vector<double> ones(members.size(), 1.0);
  return make_step_distribution(members, ones);
}

double cdf_at(const StepDistribution& f, double x) {
  auto k = f.index_at(x);
  return k < 0 ? 0.0 : f.cum_probs()[static_cast<std::size_t>(k)];
}

double quantile_at(const StepDistribution& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument(fmt::format("quantile level {} outside (0, 1)", alpha));
  auto c = f.cum_probs();
  auto it = std::lower_bound(c.begin(), c.end(), alpha);
  return f.support()[static_cast<std::size_t>(std::distance(c.begin(), it))];
}

CaseCollection::CaseCollection(std::vector<ForecastCase> cases) : cases_(std::move(cases)) {
  if (cases_.empty()) throw std::invalid_argument("case collection is empty");
  for (std::size_t i = 0; i < cases_.size(); ++i)
    if (!std::isfinite(cases_[i].outcome))
      throw std::invalid_argument(fmt::format("outcome of case {} is not finite", i));
}

std::vector<double> CaseCollection::outcomes() const {
  std::vector<double> ys;
  ys.reserve(cases_.size());
  for (const auto& c : cases_) ys.push_back(c.outcome);
  return ys;
}

double CaseCollection::min_outcome() const {
  double m = cases_.front().outcome;
  for (const auto& c : cases_) m = std::min(m, c.outcome);
  return m;
}

double CaseCollection::max_outcome() const {
  double m = cases_.front().outcome;
  for (const auto& c : cases_) m = std::max(m, c.outcome);
  return m;
}

CompensatedSum& CompensatedSum::operator+=(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
  return *this;
}

}  // namespace crpsdecomp
