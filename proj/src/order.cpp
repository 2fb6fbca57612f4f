#include "crpsdecomp/order.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "poset.hpp"

namespace crpsdecomp {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Equal: return "EQUAL";
    case Relation::Leq: return "LEQ";
    case Relation::Geq: return "GEQ";
    case Relation::Incomparable: return "INCOMPARABLE";
  }
  return "?";
}

Relation mirror(Relation r) {
  if (r == Relation::Leq) return Relation::Geq;
  if (r == Relation::Geq) return Relation::Leq;
  return r;
}

Relation stochastic_order(const StepDistribution& f, const StepDistribution& g) {
  auto fx = f.support(), fc = f.cum_probs();
  auto gx = g.support(), gc = g.cum_probs();
  std::size_t i = 0, j = 0;
  double fv = 0.0, gv = 0.0;
  bool f_above = false, g_above = false;  // F(x) > G(x) somewhere / G(x) > F(x) somewhere
  while (i < fx.size() || j < gx.size()) {
    double x;
    if (j == gx.size() || (i < fx.size() && fx[i] <= gx[j]))
      x = fx[i];
    else
      x = gx[j];
    while (i < fx.size() && fx[i] == x) fv = fc[i++];
    while (j < gx.size() && gx[j] == x) gv = gc[j++];
    if (fv > gv) f_above = true;
    if (gv > fv) g_above = true;
    if (f_above && g_above) return Relation::Incomparable;
  }
  if (f_above) return Relation::Leq;
  if (g_above) return Relation::Geq;
  return Relation::Equal;
}

OrderRelationMatrix::OrderRelationMatrix(std::size_t n) : n_(n), rel_(n * n, Relation::Incomparable) {
  for (std::size_t i = 0; i < n; ++i) rel_[i * n + i] = Relation::Equal;
}

void OrderRelationMatrix::set(std::size_t i, std::size_t j, Relation r) {
  if (i >= n_ || j >= n_) throw std::out_of_range(fmt::format("relation index ({}, {}) out of range", i, j));
  rel_[i * n_ + j] = r;
  rel_[j * n_ + i] = mirror(r);
}

void OrderRelationMatrix::validate() const { (void)detail::poset_from_matrix(*this); }

OrderRelationMatrix order_matrix(const CaseCollection& cases) { return detail::to_matrix(detail::poset_from_cases(cases)); }

namespace detail {
namespace {

void finish(Poset& p) {
  const std::size_t g = p.groups();
  p.up.assign(g, Bits(g));
  for (std::size_t a = 0; a < g; ++a)
    for (auto h = p.down[a].find_first(); h != Bits::npos; h = p.down[a].find_next(h)) p.up[h].set(a);

  p.is_chain = true;
  for (std::size_t a = 0; a < g && p.is_chain; ++a)
    if (p.down[a].count() + p.up[a].count() != g - 1) p.is_chain = false;

  p.lower_covers.assign(g, {});
  p.upper_covers.assign(g, {});
  if (p.is_chain) {
    p.chain.assign(g, 0);
    for (std::size_t a = 0; a < g; ++a) p.chain[p.down[a].count()] = a;
    for (std::size_t k = 1; k < g; ++k) {
      p.lower_covers[p.chain[k]].push_back(p.chain[k - 1]);
      p.upper_covers[p.chain[k - 1]].push_back(p.chain[k]);
    }
    return;
  }
  p.chain.clear();
  // Visit the lower set of a from the top down. Anything above h in it comes
  // first, so h is a cover exactly when no cover found so far lies above it.
  std::vector<std::size_t> depth(g), top_down(g);
  for (std::size_t a = 0; a < g; ++a) depth[a] = p.down[a].count();
  std::iota(top_down.begin(), top_down.end(), 0);
  std::sort(top_down.begin(), top_down.end(), [&](std::size_t x, std::size_t y) { return depth[x] > depth[y]; });
  Bits covered(g);
  for (std::size_t a = 0; a < g; ++a) {
    if (depth[a] == 0) continue;
    covered.reset();
    std::size_t left = depth[a];
    for (std::size_t k = 0; k < g && left > 0; ++k) {
      const std::size_t h = top_down[k];
      if (!p.down[a].test(h)) continue;
      --left;
      if (covered.test(h)) continue;
      p.lower_covers[a].push_back(h);
      p.upper_covers[h].push_back(a);
      covered |= p.down[h];
    }
  }
}

}  // namespace

Poset poset_from_cases(const CaseCollection& cases) {
  const std::size_t n = cases.size();
  Poset p;
  p.group_of.assign(n, 0);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return cases[a].forecast < cases[b].forecast; });
  std::vector<const StepDistribution*> rep;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || !(cases[idx[k]].forecast == cases[idx[k - 1]].forecast)) {
      rep.push_back(&cases[idx[k]].forecast);
      p.members.emplace_back();
    }
    p.members.back().push_back(idx[k]);
    p.group_of[idx[k]] = p.members.size() - 1;
  }
  for (auto& m : p.members) std::sort(m.begin(), m.end());

  const std::size_t g = p.groups();
  std::vector<double> means(g);
  for (std::size_t a = 0; a < g; ++a) means[a] = rep[a]->mean();
  std::vector<std::size_t> by_mean(g);
  std::iota(by_mean.begin(), by_mean.end(), 0);
  std::stable_sort(by_mean.begin(), by_mean.end(), [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });

  // Walk a linear extension (increasing mean); relations implied by
  // transitivity are inherited instead of recomputed.
  p.down.assign(g, Bits(g));
  bool inverted = false;
  for (std::size_t pi = 0; pi < g && !inverted; ++pi) {
    const std::size_t a = by_mean[pi];
    for (std::size_t qi = pi; qi-- > 0;) {
      const std::size_t b = by_mean[qi];
      if (p.down[a].test(b)) continue;
      Relation r = stochastic_order(*rep[b], *rep[a]);
      if (r == Relation::Leq) {
        p.down[a] |= p.down[b];
        p.down[a].set(b);
      } else if (r == Relation::Geq) {
        inverted = true;  // means tied up to rounding; fall back to all pairs
        break;
      }
    }
  }
  if (inverted) {
    p.down.assign(g, Bits(g));
    for (std::size_t a = 0; a < g; ++a)
      for (std::size_t b = a + 1; b < g; ++b) {
        Relation r = stochastic_order(*rep[a], *rep[b]);
        if (r == Relation::Leq) p.down[b].set(a);
        if (r == Relation::Geq) p.down[a].set(b);
      }
  }
  finish(p);
  return p;
}

Poset poset_from_matrix(const OrderRelationMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("empty relation matrix");
  for (std::size_t i = 0; i < n; ++i) {
    if (m(i, i) != Relation::Equal) throw std::invalid_argument(fmt::format("diagonal entry {} is not EQUAL", i));
    for (std::size_t j = i + 1; j < n; ++j)
      if (m(j, i) != mirror(m(i, j)))
        throw std::invalid_argument(fmt::format("entries ({}, {}) and ({}, {}) are not mirrored", i, j, j, i));
  }

  Poset p;
  constexpr std::size_t unassigned = static_cast<std::size_t>(-1);
  p.group_of.assign(n, unassigned);
  std::vector<std::size_t> rep;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.group_of[i] != unassigned) continue;
    const std::size_t gid = p.members.size();
    p.members.emplace_back();
    rep.push_back(i);
    for (std::size_t j = i; j < n; ++j) {
      if (m(i, j) != Relation::Equal) continue;
      if (p.group_of[j] != unassigned)
        throw std::invalid_argument(fmt::format("EQUAL is not transitive around case {}", j));
      p.group_of[j] = gid;
      p.members[gid].push_back(j);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t r = rep[p.group_of[j]];
    if (r == j) continue;
    for (std::size_t k = 0; k < n; ++k)
      if (m(j, k) != m(r, k))
        throw std::invalid_argument(
            fmt::format("cases {} and {} are EQUAL but relate differently to case {}", r, j, k));
  }

  const std::size_t g = p.groups();
  p.down.assign(g, Bits(g));
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b)
      if (m(rep[b], rep[a]) == Relation::Leq) p.down[a].set(b);
  for (std::size_t a = 0; a < g; ++a)
    for (auto h = p.down[a].find_first(); h != Bits::npos; h = p.down[a].find_next(h))
      if (!p.down[h].is_subset_of(p.down[a]))
        throw std::invalid_argument(fmt::format("relation matrix is not transitive below case {}", rep[a]));
  finish(p);
  return p;
}

OrderRelationMatrix to_matrix(const Poset& p) {
  OrderRelationMatrix m(p.cases());
  for (std::size_t a = 0; a < p.groups(); ++a) {
    const auto& ma = p.members[a];
    for (std::size_t x = 0; x < ma.size(); ++x)
      for (std::size_t y = x + 1; y < ma.size(); ++y) m.set(ma[x], ma[y], Relation::Equal);
    for (auto h = p.down[a].find_first(); h != Bits::npos; h = p.down[a].find_next(h))
      for (std::size_t i : p.members[h])
        for (std::size_t j : ma) m.set(i, j, Relation::Leq);
  }
  return m;
}

}  // namespace detail
}  // namespace crpsdecomp
