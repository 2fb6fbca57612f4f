#include "crpsdecomp/isotonic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "antitonic.hpp"
#include "poset.hpp"

namespace crpsdecomp {

namespace {

void check_lengths(std::size_t values, std::size_t keys) {
  if (values != keys) throw std::invalid_argument(fmt::format("{} values but {} keys", values, keys));
}

std::vector<std::size_t> key_order(std::span<const double> keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return order;
}

// Runs of equal keys in key order, as [first, last) positions.
std::vector<std::pair<std::size_t, std::size_t>> tie_runs(std::span<const double> keys,
                                                          const std::vector<std::size_t>& order) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || keys[order[k]] != keys[order[k - 1]])
      runs.emplace_back(k, k + 1);
    else
      runs.back().second = k + 1;
  }
  return runs;
}

}  // namespace

PavFit pav_mean(std::span<const double> values, std::span<const double> keys, std::span<const double> weights) {
  check_lengths(values.size(), keys.size());
  if (!weights.empty() && weights.size() != values.size())
    throw std::invalid_argument(fmt::format("{} values but {} weights", values.size(), weights.size()));
  PavFit fit;
  fit.order = key_order(keys);
  fit.fitted.assign(values.size(), 0.0);
  auto weight = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  struct Block {
    std::size_t first, last;
    double w, wv;
  };
  std::vector<Block> stack;
  for (auto [first, last] : tie_runs(keys, fit.order)) {
    Block b{first, last, 0.0, 0.0};
    for (std::size_t k = first; k < last; ++k) {
      b.w += weight(fit.order[k]);
      b.wv += weight(fit.order[k]) * values[fit.order[k]];
    }
    while (!stack.empty() && stack.back().wv * b.w >= b.wv * stack.back().w) {
      b.first = stack.back().first;
      b.w += stack.back().w;
      b.wv += stack.back().wv;
      stack.pop_back();
    }
    stack.push_back(b);
  }
  for (const auto& b : stack) {
    const double v = b.wv / b.w;
    fit.blocks.push_back({b.first, b.last, v});
    for (std::size_t k = b.first; k < b.last; ++k) fit.fitted[fit.order[k]] = v;
  }
  return fit;
}

PavFit pav_quantile(std::span<const double> values, std::span<const double> keys, double alpha) {
  check_lengths(values.size(), keys.size());
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument(fmt::format("quantile level {} outside (0, 1)", alpha));
  PavFit fit;
  fit.order = key_order(keys);
  fit.fitted.assign(values.size(), 0.0);

  // Members of each block stay sorted in buf[first, last).
  std::vector<double> buf(values.size());
  for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = values[fit.order[k]];
  auto block_value = [&](std::size_t first, std::size_t last) {
    return buf[first + detail::lower_quantile_rank(alpha, last - first) - 1];
  };
  std::vector<PavBlock> stack;
  for (auto [first, last] : tie_runs(keys, fit.order)) {
    std::sort(buf.begin() + static_cast<std::ptrdiff_t>(first), buf.begin() + static_cast<std::ptrdiff_t>(last));
    PavBlock b{first, last, block_value(first, last)};
    while (!stack.empty() && stack.back().value > b.value) {
      const std::size_t mid = b.first;
      b.first = stack.back().first;
      stack.pop_back();
      std::inplace_merge(buf.begin() + static_cast<std::ptrdiff_t>(b.first),
                         buf.begin() + static_cast<std::ptrdiff_t>(mid),
                         buf.begin() + static_cast<std::ptrdiff_t>(b.last));
      b.value = block_value(b.first, b.last);
    }
    stack.push_back(b);
  }
  for (const auto& b : stack)
    for (std::size_t k = b.first; k < b.last; ++k) fit.fitted[fit.order[k]] = b.value;
  fit.blocks = std::move(stack);
  return fit;
}

std::vector<double> antitonic_binary_fit(std::span<const double> indicators, const OrderRelationMatrix& relations) {
  if (indicators.size() != relations.size())
    throw std::invalid_argument(
        fmt::format("{} indicators but relation matrix of size {}", indicators.size(), relations.size()));
  const auto poset = detail::poset_from_matrix(relations);
  const std::size_t g = poset.groups();
  std::vector<double> values(g, 0.0), weights(g), fit(g);
  for (std::size_t a = 0; a < g; ++a) {
    for (std::size_t i : poset.members[a]) values[a] += indicators[i];
    weights[a] = static_cast<double>(poset.members[a].size());
    values[a] /= weights[a];
  }
  detail::AntitonicSolver solver(poset);
  solver.solve(values, weights, fit);
  std::vector<double> out(indicators.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fit[poset.group_of[i]];
  return out;
}

IdrFit::IdrFit(std::vector<double> thresholds, std::vector<StepDistribution> distinct,
               std::vector<std::size_t> case_index, OrderRelationMatrix relations)
    : thresholds_(std::move(thresholds)),
      distinct_(std::move(distinct)),
      case_index_(std::move(case_index)),
      relations_(std::move(relations)) {}

IdrFit idr_fit(const CaseCollection& cases, const OrderRelationMatrix& relations) {
  if (relations.size() != cases.size())
    throw std::invalid_argument(
        fmt::format("{} cases but relation matrix of size {}", cases.size(), relations.size()));
  const auto poset = detail::poset_from_matrix(relations);
  const std::size_t g = poset.groups();
  const auto thresholds = detail::unique_outcomes(cases);
  const std::size_t k_count = thresholds.size();
  std::vector<double> table(g * k_count);
  detail::idr_sweep(cases, poset, [&](std::size_t k, double, std::span<const double> fit, std::span<const double>) {
    for (std::size_t a = 0; a < g; ++a) table[a * k_count + k] = fit[a];
  });

  std::vector<StepDistribution> distinct;
  distinct.reserve(g);
  std::vector<double> pts, masses;
  for (std::size_t a = 0; a < g; ++a) {
    pts.clear();
    masses.clear();
    double prev = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      double v = table[a * k_count + k];
      if (v < prev) {
        if (v < prev - 1e-9)
          throw std::logic_error(fmt::format("fitted CDF decreases by {} at threshold {}", prev - v, thresholds[k]));
        v = prev;
      }
      if (k + 1 == k_count) v = 1.0;
      if (v > prev) {
        pts.push_back(thresholds[k]);
        masses.push_back(v - prev);
      }
      prev = v;
    }
    distinct.push_back(make_step_distribution(pts, masses));
  }
  return IdrFit(thresholds, std::move(distinct), poset.group_of, relations);
}

}  // namespace crpsdecomp
