#include "antitonic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <boost/graph/compressed_sparse_row_graph.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

namespace crpsdecomp::detail {

void pav_increasing(std::span<const double> values, std::span<const double> weights, std::span<double> fit) {
  struct Block {
    double w, wv;
    std::size_t first;
  };
  std::vector<Block> stack;
  stack.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    Block b{weights[i], weights[i] * values[i], i};
    while (!stack.empty() && stack.back().wv * b.w >= b.wv * stack.back().w) {
      b.w += stack.back().w;
      b.wv += stack.back().wv;
      b.first = stack.back().first;
      stack.pop_back();
    }
    stack.push_back(b);
  }
  for (std::size_t k = 0; k < stack.size(); ++k) {
    const std::size_t last = k + 1 < stack.size() ? stack[k + 1].first : values.size();
    const double v = stack[k].wv / stack[k].w;
    for (std::size_t i = stack[k].first; i < last; ++i) fit[i] = v;
  }
}

std::size_t lower_quantile_rank(double alpha, std::size_t k) {
  const double r = alpha * static_cast<double>(k);
  // alpha = l/k computed in floating point may land a hair above l
  const double j = std::ceil(r - 1e-9 * r);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(j, 1.0)), 1, k);
}

namespace {

using FlowGraph = boost::compressed_sparse_row_graph<boost::directedS>;
using FlowEdge = boost::graph_traits<FlowGraph>::edge_descriptor;

}  // namespace

// Arcs are kept in pairs (2i forward, 2i + 1 reverse) and counting-sorted by
// source, which is the order the CSR graph stores them in.
struct AntitonicSolver::FlowBuffers {
  std::vector<std::size_t> tail, head, slot, start;
  std::vector<double> cap, capacity, residual;
  std::vector<FlowEdge> reverse, pred;
  std::vector<boost::default_color_type> color;
  std::vector<long> distance;
  std::vector<std::pair<std::size_t, std::size_t>> sorted;

  void clear() {
    tail.clear();
    head.clear();
    cap.clear();
  }
  void arc(std::size_t u, std::size_t v, double c) {
    tail.push_back(u);
    head.push_back(v);
    cap.push_back(c);
    tail.push_back(v);
    head.push_back(u);
    cap.push_back(0.0);
  }

  // Returns the max flow; color[v] tells the side of the min cut.
  double max_flow(std::size_t vertices, std::size_t src, std::size_t snk) {
    const std::size_t e = tail.size();
    start.assign(vertices + 1, 0);
    for (std::size_t u : tail) ++start[u + 1];
    for (std::size_t v = 0; v < vertices; ++v) start[v + 1] += start[v];
    slot.resize(e);
    sorted.resize(e);
    {
      std::vector<std::size_t>& next = cursor_;
      next.assign(start.begin(), start.end() - 1);
      for (std::size_t i = 0; i < e; ++i) {
        slot[i] = next[tail[i]]++;
        sorted[slot[i]] = {tail[i], head[i]};
      }
    }
    FlowGraph g(boost::edges_are_sorted, sorted.begin(), sorted.end(), vertices);
    capacity.resize(e);
    residual.assign(e, 0.0);
    reverse.resize(e);
    for (std::size_t i = 0; i < e; ++i) {
      capacity[slot[i]] = cap[i];
      reverse[slot[i]] = FlowEdge(head[i], slot[i ^ 1]);
    }
    pred.assign(vertices, FlowEdge());
    color.assign(vertices, boost::white_color);
    distance.assign(vertices, 0);
    const auto eidx = boost::get(boost::edge_index, g);
    const auto vidx = boost::get(boost::vertex_index, g);
    return boost::boykov_kolmogorov_max_flow(
        g, boost::make_iterator_property_map(capacity.begin(), eidx),
        boost::make_iterator_property_map(residual.begin(), eidx),
        boost::make_iterator_property_map(reverse.begin(), eidx), boost::make_iterator_property_map(pred.begin(), vidx),
        boost::make_iterator_property_map(color.begin(), vidx),
        boost::make_iterator_property_map(distance.begin(), vidx), vidx, src, snk);
  }

 private:
  std::vector<std::size_t> cursor_;
};

AntitonicSolver::AntitonicSolver(const Poset& poset)
    : poset_(poset), local_(poset.groups(), 0), stamp_(poset.groups(), 0), flow_(std::make_unique<FlowBuffers>()) {
  const std::size_t g = poset.groups();
  topo_.resize(g);
  std::iota(topo_.begin(), topo_.end(), 0);
  std::vector<std::size_t> depth(g);
  for (std::size_t a = 0; a < g; ++a) depth[a] = poset.down[a].count();
  std::sort(topo_.begin(), topo_.end(), [&](std::size_t x, std::size_t y) { return depth[x] < depth[y]; });
}

AntitonicSolver::~AntitonicSolver() = default;

void AntitonicSolver::solve(std::span<const double> values, std::span<const double> weights, std::span<double> fit) {
  const std::size_t g = poset_.groups();
  if (poset_.is_chain) {
    std::vector<double> v(g), w(g), f(g);
    for (std::size_t k = 0; k < g; ++k) {
      const std::size_t node = poset_.chain[g - 1 - k];
      v[k] = values[node];
      w[k] = weights[node];
    }
    pav_increasing(v, w, f);
    for (std::size_t k = 0; k < g; ++k) fit[poset_.chain[g - 1 - k]] = f[k];
    return;
  }
  reset_blocks();

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double vmin = *lo_it, vmax = *hi_it;
  std::copy(values.begin(), values.end(), fit.begin());
  if (vmin == vmax) {
    for (std::size_t a = 0; a < g; ++a) emit({a});
    return;
  }

  // Nodes whose whole lower set sits at the maximum (upper set at the
  // minimum) keep that value in the optimum; only the rest is contested.
  fixed_hi_.assign(g, 0);
  fixed_lo_.assign(g, 0);
  for (std::size_t a : topo_) {
    bool f = values[a] == vmax;
    for (std::size_t h : poset_.lower_covers[a]) f = f && fixed_hi_[h];
    fixed_hi_[a] = f;
  }
  for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
    bool f = values[*it] == vmin;
    for (std::size_t u : poset_.upper_covers[*it]) f = f && fixed_lo_[u];
    fixed_lo_[*it] = f;
  }
  auto contested = [&](std::size_t a) { return !fixed_hi_[a] && !fixed_lo_[a]; };

  std::vector<char>& seen = seen_;
  seen.assign(g, 0);
  std::vector<std::size_t> queue;
  for (std::size_t start = 0; start < g; ++start) {
    if (!contested(start)) emit({start});
    if (seen[start] || !contested(start)) continue;
    queue.assign(1, start);
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t a = queue[head];
      for (std::size_t h : poset_.lower_covers[a])
        if (contested(h) && !seen[h]) {
          seen[h] = 1;
          queue.push_back(h);
        }
      for (std::size_t u : poset_.upper_covers[a])
        if (contested(u) && !seen[u]) {
          seen[u] = 1;
          queue.push_back(u);
        }
    }
    solve_block(queue, values, weights, fit);
  }
}

bool AntitonicSolver::chain_depths(const std::vector<std::size_t>& block, std::vector<std::size_t>& depth) const {
  const std::size_t m = block.size();
  depth.assign(m, 0);
  std::vector<char> taken(m, 0);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& down = poset_.down[block[k]];
    for (std::size_t j = 0; j < m; ++j) depth[k] += down.test(block[j]);
    if (taken[depth[k]]) return false;
    taken[depth[k]] = 1;
  }
  return true;
}

void AntitonicSolver::solve_chain(const std::vector<std::size_t>& block, const std::vector<std::size_t>& depth,
                                  std::span<const double> values, std::span<const double> weights,
                                  std::span<double> fit) {
  // Top of the chain first, so that the fitted values increase.
  const std::size_t m = block.size();
  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < m; ++k) order[m - 1 - depth[k]] = block[k];
  std::vector<double> v(m), w(m), f(m);
  for (std::size_t k = 0; k < m; ++k) {
    v[k] = values[order[k]];
    w[k] = weights[order[k]];
  }
  pav_increasing(v, w, f);
  std::vector<std::size_t> run;
  for (std::size_t k = 0; k < m; ++k) {
    fit[order[k]] = f[k];
    run.push_back(order[k]);
    if (k + 1 == m || f[k + 1] != f[k]) emit(std::exchange(run, {}));
  }
}

void AntitonicSolver::solve_block(std::vector<std::size_t> root, std::span<const double> values,
                                  std::span<const double> weights, std::span<double> fit) {
  std::vector<std::vector<std::size_t>> work;
  std::vector<std::size_t> depth;
  work.push_back(std::move(root));
  while (!work.empty()) {
    std::vector<std::size_t> block = std::move(work.back());
    work.pop_back();
    if (block.size() == 1) {
      fit[block[0]] = values[block[0]];
      emit(std::move(block));
      continue;
    }
    const std::size_t id = ++stamp_counter_;
    for (std::size_t a : block) stamp_[a] = id;
    auto inside = [&](std::size_t a) { return stamp_[a] == id; };

    bool violated = false;
    for (std::size_t a : block) {
      for (std::size_t h : poset_.lower_covers[a])
        if (inside(h) && values[h] < values[a]) {
          violated = true;
          break;
        }
      if (violated) break;
    }
    if (!violated) {
      for (std::size_t a : block) {
        fit[a] = values[a];
        emit({a});
      }
      continue;
    }
    if (block.size() <= chain_check_limit && chain_depths(block, depth)) {
      solve_chain(block, depth, values, weights, fit);
      continue;
    }

    double sw = 0.0, swv = 0.0;
    for (std::size_t a : block) {
      sw += weights[a];
      swv += weights[a] * values[a];
    }
    const double mu = swv / sw;

    // Upper part U (values above mu) must be closed downward: a in U and h
    // below a forces h in U. Best U is a maximum-weight closure, i.e. a min cut.
    const std::size_t m = block.size();
    for (std::size_t k = 0; k < m; ++k) local_[block[k]] = k;
    FlowBuffers& fb = *flow_;
    fb.clear();
    const std::size_t src = m, snk = m + 1;
    double positive = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double c = weights[block[k]] * (values[block[k]] - mu);
      scale += std::abs(c);
      if (c > 0.0) {
        fb.arc(src, k, c);
        positive += c;
      } else if (c < 0.0) {
        fb.arc(k, snk, -c);
      }
    }
    const double inf = 2.0 * scale + 1.0;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t h : poset_.lower_covers[block[k]])
        if (inside(h)) fb.arc(k, local_[h], inf);

    const double flow = fb.max_flow(m + 2, src, snk);
    const double gain = positive - flow;
    const auto src_color = fb.color[src];
    std::vector<std::size_t> upper, lower;
    for (std::size_t k = 0; k < m; ++k) (fb.color[k] == src_color ? upper : lower).push_back(block[k]);

    if (gain <= 1e-12 * scale || upper.empty() || lower.empty()) {
      for (std::size_t a : block) fit[a] = mu;
      emit(std::move(block));
      continue;
    }
    work.push_back(std::move(upper));
    work.push_back(std::move(lower));
  }
}

void AntitonicSolver::reset_blocks() {
  blocks_.clear();
  free_ids_.clear();
  block_of_.assign(poset_.groups(), 0);
}

void AntitonicSolver::emit(std::vector<std::size_t> members) {
  std::size_t id;
  if (free_ids_.empty()) {
    id = blocks_.size();
    blocks_.emplace_back();
  } else {
    id = free_ids_.back();
    free_ids_.pop_back();
  }
  for (std::size_t a : members) block_of_[a] = id;
  blocks_[id] = std::move(members);
}

void AntitonicSolver::update(std::span<const double> values, std::span<const double> weights, std::span<double> fit,
                             std::span<const std::size_t> changed) {
  if (poset_.is_chain || blocks_.empty()) {
    solve(values, weights, fit);
    return;
  }
  // Every block of a solution certifies itself, so only order constraints
  // between blocks can fail. The region R starts as the blocks of the changed
  // nodes and is re-solved on its own. Each violated constraint on its boundary
  // then pulls the two blocks involved into the next region, until none is
  // left. After a few rounds R instead keeps growing by the blocks it violates,
  // which bounds the number of rounds.
  const std::size_t g = poset_.groups();
  region_mark_.resize(g, 0);
  seen_mark_.resize(g, 0);
  std::size_t mark = 0;
  std::vector<std::size_t> region, pending, comp;
  auto start_region = [&] {
    mark = ++region_counter_;
    region.clear();
    for (std::size_t id : pending) {
      if (blocks_[id].empty()) continue;
      for (std::size_t a : blocks_[id]) {
        region_mark_[a] = mark;
        region.push_back(a);
      }
      blocks_[id].clear();
      free_ids_.push_back(id);
    }
    pending.clear();
  };
  for (std::size_t c : changed) pending.push_back(block_of_[c]);
  start_region();
  auto in_region = [&](std::size_t a) { return region_mark_[a] == mark; };
  auto tol = [](double x) { return 1e-12 * (1.0 + std::abs(x)); };

  constexpr std::size_t local_rounds = 8;
  for (std::size_t round = 0;; ++round) {
    // Re-solve R one connected piece at a time.
    const std::size_t seen = ++region_counter_;
    for (std::size_t start : region) {
      if (seen_mark_[start] == seen) continue;
      comp.assign(1, start);
      seen_mark_[start] = seen;
      for (std::size_t head = 0; head < comp.size(); ++head) {
        const std::size_t a = comp[head];
        for (const auto* nb : {&poset_.lower_covers[a], &poset_.upper_covers[a]})
          for (std::size_t b : *nb)
            if (in_region(b) && seen_mark_[b] != seen) {
              seen_mark_[b] = seen;
              comp.push_back(b);
            }
      }
      solve_block(comp, values, weights, fit);
    }

    const bool local = round < local_rounds;
    for (std::size_t a : region) {
      bool violated = false;
      for (std::size_t h : poset_.lower_covers[a])
        if (!in_region(h) && fit[h] < fit[a] - tol(fit[a])) {
          pending.push_back(block_of_[h]);
          violated = true;
        }
      for (std::size_t u : poset_.upper_covers[a])
        if (!in_region(u) && fit[a] < fit[u] - tol(fit[u])) {
          pending.push_back(block_of_[u]);
          violated = true;
        }
      if (violated && local) pending.push_back(block_of_[a]);
    }
    if (pending.empty()) break;
    if (!local)
      for (std::size_t a : region) pending.push_back(block_of_[a]);
    start_region();
  }
}

std::vector<double> unique_outcomes(const CaseCollection& cases) {
  auto ys = cases.outcomes();
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  return ys;
}

void idr_sweep(const CaseCollection& cases, const Poset& poset, const IdrVisitor& visit) {
  const std::size_t n = cases.size();
  const std::size_t g = poset.groups();
  const auto thresholds = unique_outcomes(cases);
  std::vector<std::size_t> by_outcome(n);
  std::iota(by_outcome.begin(), by_outcome.end(), 0);
  std::stable_sort(by_outcome.begin(), by_outcome.end(),
                   [&](std::size_t a, std::size_t b) { return cases[a].outcome < cases[b].outcome; });

  std::vector<double> ones(g, 0.0), counts(g), values(g), fit(g);
  for (std::size_t a = 0; a < g; ++a) counts[a] = static_cast<double>(poset.members[a].size());
  AntitonicSolver solver(poset);
  std::vector<std::size_t> changed;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    changed.clear();
    while (pos < n && cases[by_outcome[pos]].outcome == thresholds[k]) {
      const std::size_t a = poset.group_of[by_outcome[pos++]];
      ones[a] += 1.0;
      values[a] = ones[a] / counts[a];
      changed.push_back(a);
    }
    if (k == 0) {
      for (std::size_t a = 0; a < g; ++a) values[a] = ones[a] / counts[a];
      solver.solve(values, counts, fit);
    } else {
      solver.update(values, counts, fit, changed);
    }
    visit(k, thresholds[k], fit, ones);
  }
}

}  // namespace crpsdecomp::detail
