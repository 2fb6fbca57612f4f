#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "crpsdecomp/decomp.hpp"
#include "crpsdecomp/scoring.hpp"

namespace crpsdecomp {

namespace {

constexpr double prob_tol = 1e-12;

bool multiple_of(double p, std::size_t m) {
  const double v = p * static_cast<double>(m);
  return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, v);
}

DecompositionResult remainder(Method method, const CaseCollection& cases, double mcb) {
  DecompositionResult r;
  r.method = method;
  r.n = cases.size();
  r.mean_score = mean_crps(cases);
  r.unc = uncertainty(cases);
  r.mcb = mcb;
  r.dsc = mcb + r.unc - r.mean_score;
  return r;
}

std::pair<DecompositionResult, HersbachDiagnostics> modified(const CaseCollection& cases) {
  // Pool the cumulative probabilities of all atoms but the last, merging runs
  // whose steps are at most prob_tol into their smallest member.
  std::vector<double> pooled;
  for (const auto& c : cases) {
    auto cum = c.forecast.cum_probs();
    pooled.insert(pooled.end(), cum.begin(), cum.end() - 1);
  }
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> probs;
  double last = 0.0;
  for (double p : pooled) {
    if (probs.empty() || p - last > prob_tol) probs.push_back(p);
    last = p;
  }
  auto level_of = [&](double p) {
    auto it = std::upper_bound(probs.begin(), probs.end(), p);
    return static_cast<std::size_t>(it - probs.begin()) - 1;
  };

  const std::size_t levels = probs.size();
  std::vector<CompensatedSum> g(levels), f(levels);
  for (const auto& c : cases) {
    const auto& fc = c.forecast;
    auto x = fc.support();
    auto cum = fc.cum_probs();
    const auto ky = fc.index_at(c.outcome);
    // Level of F(y); F(y) = 0 lies below every level and F(y) = 1 above.
    std::ptrdiff_t ylev = -1;
    if (ky >= 0) {
      const auto k = static_cast<std::size_t>(ky);
      ylev = static_cast<std::ptrdiff_t>(k + 1 == x.size() ? probs.size() : level_of(cum[k]));
    }
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const std::size_t j = level_of(cum[k]);
      const double w = x[k + 1] - x[k];
      g[j] += w;
      if (ylev <= static_cast<std::ptrdiff_t>(j)) f[j] += w;
    }
  }

  HersbachDiagnostics diag;
  diag.variant = HersbachVariant::Modified;
  const double n = static_cast<double>(cases.size());
  CompensatedSum mcb;
  for (std::size_t j = 0; j < levels; ++j) {
    const double gj = g[j].value() / n;
    const double fj = gj > 0.0 ? f[j].value() / (n * gj) : 0.0;
    diag.probs.push_back(probs[j]);
    diag.widths.push_back(gj);
    diag.freqs.push_back(fj);
    mcb += gj * (probs[j] - fj) * (probs[j] - fj);
  }
  std::optional<std::size_t> m = 1;
  for (const auto& c : cases) {
    const auto mi = ensemble_size(c.forecast);
    if (!mi) {
      m.reset();
      break;
    }
    m = std::lcm(*m, *mi);
    if (*m > 10000) {
      m.reset();
      break;
    }
  }
  diag.ensemble_size = m.value_or(0);
  diag.ms = ms_term(cases);
  return {remainder(Method::HB, cases, mcb.value()), std::move(diag)};
}

std::pair<DecompositionResult, HersbachDiagnostics> original(const CaseCollection& cases) {
  std::size_t m = 1;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto mi = ensemble_size(cases[i].forecast);
    if (!mi)
      throw std::invalid_argument(fmt::format(
          "case {}: forecast is not an equally weighted ensemble of at most 10000 members", i));
    m = std::lcm(m, *mi);
    if (m > 10000) throw std::invalid_argument("forecasts have no common ensemble size up to 10000 members");
  }
  if (m < 2) throw std::invalid_argument("the original Hersbach decomposition needs ensembles of at least 2 members");

  const double n = static_cast<double>(cases.size());
  const double md = static_cast<double>(m);
  std::vector<CompensatedSum> width(m + 1), below(m + 1), inside(m + 1);
  CompensatedSum beta0, alpham;
  double count_below = 0.0, count_above = 0.0;
  std::vector<double> x(m);
  for (const auto& c : cases) {
    for (std::size_t l = 0; l < m; ++l)
      x[l] = quantile_at(c.forecast, (static_cast<double>(l) + 0.5) / md);
    const double y = c.outcome;
    for (std::size_t l = 1; l < m; ++l) {
      const double lo = x[l - 1], hi = x[l];
      const double w = hi - lo;
      width[l] += w;
      if (y < hi) below[l] += w;
      if (lo < y && y < hi) inside[l] += y - lo;
    }
    if (y < x[0]) {
      count_below += 1.0;
      beta0 += x[0] - y;
    }
    if (y > x[m - 1]) {
      count_above += 1.0;
      alpham += y - x[m - 1];
    }
  }

  HersbachDiagnostics diag;
  diag.variant = HersbachVariant::Original;
  diag.ensemble_size = m;
  diag.probs.resize(m + 1);
  diag.widths.resize(m + 1);
  diag.freqs.resize(m + 1);
  diag.obs.resize(m + 1);
  CompensatedSum mcb;
  for (std::size_t l = 1; l < m; ++l) {
    const double p = static_cast<double>(l) / md;
    const double gl = width[l].value() / n;
    const double fl = gl > 0.0 ? below[l].value() / (n * gl) : 0.0;
    const double ml = gl > 0.0 ? inside[l].value() / (n * gl) : 0.0;
    const double ol = fl - ml;
    diag.probs[l] = p;
    diag.widths[l] = gl;
    diag.freqs[l] = fl;
    diag.obs[l] = ol;
    mcb += gl * (p - ol) * (p - ol);
  }
  // Outer bins. The upper bin uses the fraction of outcomes not above x_m,
  // so that its term is the mirror image of the lower one.
  const double o0 = count_below / n;
  const double g0 = o0 > 0.0 ? beta0.value() / (n * o0) : 0.0;
  const double above = count_above / n;
  const double gm = above > 0.0 ? alpham.value() / (n * above) : 0.0;
  const double om = 1.0 - above;
  diag.probs[0] = 0.0;
  diag.widths[0] = g0;
  diag.obs[0] = o0;
  diag.probs[m] = 1.0;
  diag.widths[m] = gm;
  diag.obs[m] = om;
  mcb += g0 * o0 * o0;
  mcb += gm * (1.0 - om) * (1.0 - om);
  diag.ms = ms_term(cases);
  return {remainder(Method::HBOrig, cases, mcb.value()), std::move(diag)};
}

}  // namespace

std::optional<std::size_t> ensemble_size(const StepDistribution& f, std::size_t max_members) {
  auto cum = f.cum_probs();
  for (std::size_t m = 1; m <= max_members; ++m)
    if (std::all_of(cum.begin(), cum.end(), [&](double p) { return multiple_of(p, m); })) return m;
  return std::nullopt;
}

std::pair<DecompositionResult, HersbachDiagnostics> decompose_hersbach(const CaseCollection& cases,
                                                                       HersbachVariant variant) {
  return variant == HersbachVariant::Original ? original(cases) : modified(cases);
}

}  // namespace crpsdecomp
