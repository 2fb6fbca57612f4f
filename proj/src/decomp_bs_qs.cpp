#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "antitonic.hpp"
#include "crpsdecomp/decomp.hpp"
#include "crpsdecomp/isotonic.hpp"
#include "crpsdecomp/scoring.hpp"
#include "decomp_common.hpp"

namespace crpsdecomp {

DecompositionResult decompose_bs(const CaseCollection& cases) {
  const std::size_t n = cases.size();
  struct Jump {
    double x;
    std::size_t i;
    double c;
  };
  std::vector<Jump> jumps;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = cases[i].forecast.support();
    auto c = cases[i].forecast.cum_probs();
    for (std::size_t k = 0; k < x.size(); ++k) jumps.push_back({x[k], i, c[k]});
  }
  std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.x < b.x; });
  std::vector<std::size_t> by_y(n);
  std::iota(by_y.begin(), by_y.end(), 0);
  std::sort(by_y.begin(), by_y.end(), [&](std::size_t a, std::size_t b) { return cases[a].outcome < cases[b].outcome; });

  std::vector<double> breaks;
  breaks.reserve(jumps.size() + n);
  for (const auto& j : jumps) breaks.push_back(j.x);
  for (const auto& c : cases) breaks.push_back(c.outcome);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> cur(n, 0.0);
  std::vector<char> hit(n, 0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  struct Block {
    double count, ones;
  };
  std::vector<Block> stack;
  stack.reserve(n);

  // On [b_k, b_{k+1}) every F_i(z) and indicator is constant, equal to its value at b_k.
  CompensatedSum recal;
  std::size_t jp = 0, yp = 0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double b = breaks[k];
    while (jp < jumps.size() && jumps[jp].x == b) {
      cur[jumps[jp].i] = jumps[jp].c;
      ++jp;
    }
    while (yp < n && cases[by_y[yp]].outcome == b) hit[by_y[yp++]] = 1;
    for (std::size_t p = 1; p < n; ++p) {
      const std::size_t v = order[p];
      std::size_t q = p;
      while (q > 0 && cur[order[q - 1]] > cur[v]) {
        order[q] = order[q - 1];
        --q;
      }
      order[q] = v;
    }
    stack.clear();
    for (std::size_t p = 0; p < n;) {
      Block blk{0.0, 0.0};
      const double key = cur[order[p]];
      while (p < n && cur[order[p]] == key) {
        blk.count += 1.0;
        blk.ones += hit[order[p++]];
      }
      while (!stack.empty() && stack.back().ones * blk.count >= blk.ones * stack.back().count) {
        blk.count += stack.back().count;
        blk.ones += stack.back().ones;
        stack.pop_back();
      }
      stack.push_back(blk);
    }
    CompensatedSum cal;
    for (const auto& blk : stack) cal += blk.ones * (blk.count - blk.ones) / blk.count;
    recal += (breaks[k + 1] - b) * cal.value();
  }
  return detail::finalize(Method::BS, n, mean_crps(cases), recal.value() / static_cast<double>(n), uncertainty(cases));
}

namespace {

// Quantile forecasts of all cases at a level alpha, kept sorted, and the
// isotonic quantile fit of the outcomes in that order.
class QuantileLevels {
 public:
  explicit QuantileLevels(const CaseCollection& cases)
      : cases_(cases), n_(cases.size()), ptr_(n_, 0), q_(n_), order_(n_), buf_(n_), work_(n_) {
    for (std::size_t i = 0; i < n_; ++i) q_[i] = cases[i].forecast.support()[0];
    std::iota(order_.begin(), order_.end(), 0);
    dirty_ = true;
  }

  // alpha must not decrease between calls.
  void advance(double alpha) {
    for (std::size_t i = 0; i < n_; ++i) {
      auto c = cases_[i].forecast.cum_probs();
      std::size_t k = ptr_[i];
      while (c[k] < alpha) ++k;
      if (k != ptr_[i]) {
        ptr_[i] = k;
        q_[i] = cases_[i].forecast.support()[k];
        dirty_ = true;
      }
    }
    if (dirty_) reorder();
  }

  // Sum over cases of qs(F_i^{-1}(alpha), y_i).
  double forecast_sum(double alpha) const {
    CompensatedSum s;
    for (std::size_t i = 0; i < n_; ++i) s += quantile_score(q_[i], cases_[i].outcome, alpha);
    return s.value();
  }

  // Sum over cases of qs of the calibrated quantiles.
  double recalibrated_sum(double alpha) {
    std::copy(buf_.begin(), buf_.end(), work_.begin());
    auto value = [&](std::size_t first, std::size_t last) {
      return work_[first + detail::lower_quantile_rank(alpha, last - first) - 1];
    };
    stack_.clear();
    for (auto [first, last] : runs_) {
      PavBlock b{first, last, value(first, last)};
      while (!stack_.empty() && stack_.back().value > b.value) {
        const std::size_t mid = b.first;
        b.first = stack_.back().first;
        stack_.pop_back();
        std::inplace_merge(work_.begin() + static_cast<std::ptrdiff_t>(b.first),
                           work_.begin() + static_cast<std::ptrdiff_t>(mid),
                           work_.begin() + static_cast<std::ptrdiff_t>(b.last));
        b.value = value(b.first, b.last);
      }
      stack_.push_back(b);
    }
    CompensatedSum s;
    for (const auto& b : stack_)
      for (std::size_t k = b.first; k < b.last; ++k) s += quantile_score(b.value, work_[k], alpha);
    return s.value();
  }

 private:
  void reorder() {
    for (std::size_t p = 1; p < n_; ++p) {
      const std::size_t v = order_[p];
      std::size_t r = p;
      while (r > 0 && q_[order_[r - 1]] > q_[v]) {
        order_[r] = order_[r - 1];
        --r;
      }
      order_[r] = v;
    }
    runs_.clear();
    for (std::size_t p = 0; p < n_; ++p) {
      buf_[p] = cases_[order_[p]].outcome;
      if (p == 0 || q_[order_[p]] != q_[order_[p - 1]])
        runs_.emplace_back(p, p + 1);
      else
        runs_.back().second = p + 1;
    }
    for (auto [first, last] : runs_)
      std::sort(buf_.begin() + static_cast<std::ptrdiff_t>(first), buf_.begin() + static_cast<std::ptrdiff_t>(last));
    dirty_ = false;
  }

  const CaseCollection& cases_;
  std::size_t n_;
  std::vector<std::size_t> ptr_;
  std::vector<double> q_;
  std::vector<std::size_t> order_;
  std::vector<double> buf_;
  std::vector<double> work_;
  std::vector<std::pair<std::size_t, std::size_t>> runs_;
  std::vector<PavBlock> stack_;
  bool dirty_ = true;
};

}  // namespace

// The CRPS is twice the integral of the quantile score over the levels, so
// every level integral below is doubled.
DecompositionResult decompose_qs(const CaseCollection& cases, QsMode mode) {
  const std::size_t n = cases.size();
  if (mode.kind == QsMode::Kind::Auto)
    mode = n <= QsMode::exact_limit ? QsMode::exact() : QsMode::grid(mode.levels);
  const double mean_score = mean_crps(cases);
  const double unc = uncertainty(cases);
  const double nn = static_cast<double>(n);
  QuantileLevels levels(cases);

  if (mode.kind == QsMode::Kind::Exact) {
    // Block quantiles change only at l/k, the ordering only at the forecasts'
    // cumulative probabilities; in between every term is affine in alpha.
    std::vector<double> breaks{0.0, 1.0};
    for (std::size_t k = 2; k <= n; ++k)
      for (std::size_t l = 1; l < k; ++l) breaks.push_back(static_cast<double>(l) / static_cast<double>(k));
    for (const auto& c : cases)
      for (double p : c.forecast.cum_probs())
        if (p < 1.0) breaks.push_back(p);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    CompensatedSum recal;
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
      const double lo = breaks[j], hi = breaks[j + 1];
      const double alpha = lo + 0.5 * (hi - lo);
      levels.advance(alpha);
      recal += (hi - lo) * levels.recalibrated_sum(alpha);
    }
    return detail::finalize(Method::QS, n, mean_score, 2.0 * recal.value() / nn, unc);
  }

  if (mode.levels < 2) throw std::invalid_argument("grid-mode QS needs at least two levels");
  auto ys = cases.outcomes();
  std::sort(ys.begin(), ys.end());
  const double nl = static_cast<double>(mode.levels);
  CompensatedSum recal, forecast, marginal;
  for (std::size_t j = 0; j < mode.levels; ++j) {
    const double alpha = (static_cast<double>(j) + 0.5) / nl;
    levels.advance(alpha);
    recal += levels.recalibrated_sum(alpha);
    forecast += levels.forecast_sum(alpha);
    const double qm = ys[detail::lower_quantile_rank(alpha, n) - 1];
    CompensatedSum m;
    for (double y : ys) m += quantile_score(qm, y, alpha);
    marginal += m.value();
  }
  // Midpoint error on the two terms with known integrals bounds the error on the third.
  const double scale = 2.0 / (nn * nl);
  const double err = std::abs(scale * forecast.value() - mean_score) + std::abs(scale * marginal.value() - unc);
  auto r = detail::finalize(Method::QS, n, mean_score, scale * recal.value(), unc, 2.0 * err);
  r.qs_levels = mode.levels;
  r.approximation_error = 2.0 * err;
  return r;
}

}  // namespace crpsdecomp
