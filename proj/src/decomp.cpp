#include "crpsdecomp/decomp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "antitonic.hpp"
#include "crpsdecomp/scoring.hpp"
#include "decomp_common.hpp"
#include "poset.hpp"

namespace crpsdecomp {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::CT: return "ct";
    case Method::ISO: return "iso";
    case Method::BS: return "bs";
    case Method::QS: return "qs";
    case Method::HB: return "hb";
    case Method::HBOrig: return "hb-orig";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::CT, Method::ISO, Method::BS, Method::QS, Method::HB, Method::HBOrig})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

namespace detail {

DecompositionResult finalize(Method method, std::size_t n, double mean_score, double recal, double unc,
                             double extra_tolerance) {
  DecompositionResult r;
  r.method = method;
  r.n = n;
  r.mean_score = mean_score;
  r.unc = unc;
  const double tol = 1e-12 * std::max({1.0, std::abs(mean_score), std::abs(unc)}) + extra_tolerance;
  auto clamp_to = [&](double bound, const char* what) {
    if (recal <= bound) return;
    if (recal - bound > tol)
      throw std::logic_error(fmt::format("{}: recalibrated score {} exceeds {} {} by more than {}", to_string(method),
                                         recal, what, bound, tol));
    r.notes.push_back(fmt::format("recalibrated score exceeded {} by {:.3g}; clamped", what, recal - bound));
    recal = bound;
  };
  clamp_to(mean_score, "the mean score");
  clamp_to(unc, "the uncertainty");
  r.mcb = mean_score - recal;
  r.dsc = unc - recal;
  return r;
}

// Sum over i < j of |y_i - y_j| for sorted ys, written as a positive sum over gaps.
double pairwise_gap_sum(std::span<const double> sorted) {
  CompensatedSum s;
  const std::size_t k = sorted.size();
  for (std::size_t g = 0; g + 1 < k; ++g) {
    const double d = sorted[g + 1] - sorted[g];
    if (d != 0.0) s += d * static_cast<double>(g + 1) * static_cast<double>(k - g - 1);
  }
  return s.value();
}

}  // namespace detail

double uncertainty(const CaseCollection& cases) {
  // Mean CRPS of an empirical distribution over its own sample equals the
  // mean absolute pairwise difference divided by two.
  auto ys = cases.outcomes();
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(ys.size());
  return detail::pairwise_gap_sum(ys) / (n * n);
}

DecompositionResult decompose_ct(const CaseCollection& cases) {
  const std::size_t n = cases.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (cases[a].forecast == cases[b].forecast) return cases[a].outcome < cases[b].outcome;
    return cases[a].forecast < cases[b].forecast;
  });
  CompensatedSum recal;
  std::vector<double> ys;
  for (std::size_t k = 0; k < n;) {
    std::size_t e = k;
    ys.clear();
    while (e < n && cases[idx[e]].forecast == cases[idx[k]].forecast) ys.push_back(cases[idx[e++]].outcome);
    recal += detail::pairwise_gap_sum(ys) / static_cast<double>(ys.size());
    k = e;
  }
  const double nn = static_cast<double>(n);
  auto r = detail::finalize(Method::CT, n, mean_crps(cases), recal.value() / nn, uncertainty(cases));
  return r;
}

DecompositionResult decompose_iso(const CaseCollection& input, const std::optional<TruncationSpec>& truncation) {
  std::optional<CaseCollection> truncated;
  if (truncation) truncated.emplace(truncate(input, truncation->a, truncation->b));
  const CaseCollection& cases = truncated ? *truncated : input;

  const auto poset = detail::poset_from_cases(cases);
  const auto thresholds = detail::unique_outcomes(cases);
  const std::size_t g = poset.groups();
  std::vector<double> counts(g);
  for (std::size_t a = 0; a < g; ++a) counts[a] = static_cast<double>(poset.members[a].size());

  // Between consecutive thresholds the fitted CDFs and the indicators are
  // constant, so the mean CRPS of the fit is a finite sum.
  CompensatedSum recal;
  detail::idr_sweep(cases, poset, [&](std::size_t k, double z, std::span<const double> fit, std::span<const double> ones) {
    if (k + 1 == thresholds.size()) return;
    CompensatedSum sq;
    for (std::size_t a = 0; a < g; ++a) {
      const double t = fit[a];
      sq += counts[a] * t * t - 2.0 * t * ones[a] + ones[a];
    }
    recal += (thresholds[k + 1] - z) * sq.value();
  });
  const double n = static_cast<double>(cases.size());
  auto r = detail::finalize(Method::ISO, cases.size(), mean_crps(cases), recal.value() / n, uncertainty(cases));
  r.truncation = truncation;
  return r;
}

double ms_term(const CaseCollection& cases) {
  CompensatedSum s;
  for (const auto& c : cases) {
    const auto& f = c.forecast;
    const auto k = f.index_at(c.outcome);
    if (k < 0) {
      s += f.min() - c.outcome;
    } else {
      const auto ku = static_cast<std::size_t>(k);
      s += (2.0 * f.cum_probs()[ku] - 1.0) * (c.outcome - f.support()[ku]);
    }
  }
  return s.value() / static_cast<double>(cases.size());
}

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; });
}

namespace {

void add_ge(AuditReport& rep, std::string name, double lhs, double rhs, double slack) {
  const double margin = lhs - rhs;
  rep.checks.push_back({std::move(name), lhs, rhs, margin, margin >= -slack});
}

std::string tag(const DecompositionResult& r) {
  return fmt::format("{}{}", to_string(r.method), r.truncation ? "^(a,b)" : "");
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

void add_per_result(AuditReport& rep, const DecompositionResult& r) {
  const std::string t = upper(tag(r));
  const double tol = exactness_rtol * std::max({std::abs(r.mean_score), std::abs(r.unc), std::abs(r.mcb), std::abs(r.dsc)});
  const double resid = std::abs(r.exactness_residual());
  rep.checks.push_back({fmt::format("exactness {}", t), r.mean_score, r.mcb - r.dsc + r.unc, tol - resid, resid <= tol});
  add_ge(rep, fmt::format("MCB_{} >= 0", t), r.mcb, 0.0, 1e-12);
  // Hersbach discrimination is a remainder and may be negative.
  if (r.method != Method::HB && r.method != Method::HBOrig) add_ge(rep, fmt::format("DSC_{} >= 0", t), r.dsc, 0.0, 1e-12);
  rep.results.push_back(r);
}

}  // namespace

bool comparable(Method m) { return m == Method::CT || m == Method::ISO || m == Method::BS || m == Method::QS; }

AuditReport audit_results(const std::vector<DecompositionResult>& results) {
  AuditReport rep;
  auto find = [&](Method m) -> const DecompositionResult* {
    for (const auto& r : results)
      if (r.method == m) return &r;
    return nullptr;
  };
  const auto* ct = find(Method::CT);
  const auto* iso = find(Method::ISO);
  const auto* bs = find(Method::BS);
  const auto* qs = find(Method::QS);
  auto slack = [](const DecompositionResult& r) { return audit_slack + r.approximation_error; };
  if (ct) add_ge(rep, "S >= MCB_CT", ct->mean_score, ct->mcb, audit_slack);
  if (ct && iso) add_ge(rep, "MCB_CT >= MCB_ISO", ct->mcb, iso->mcb, audit_slack);
  const DecompositionResult* top = iso ? iso : ct;
  if (top) {
    const std::string name = upper(std::string(to_string(top->method)));
    if (bs) add_ge(rep, fmt::format("MCB_{} >= MCB_BS", name), top->mcb, bs->mcb, audit_slack);
    if (qs) add_ge(rep, fmt::format("MCB_{} >= MCB_QS", name), top->mcb, qs->mcb, slack(*qs));
  }
  for (const auto& r : results) add_per_result(rep, r);
  return rep;
}

AuditReport evaluate_audit(const AuditInputs& in) {
  AuditReport rep = audit_results({in.ct, in.iso, in.bs, in.qs});
  if (in.iso_truncated && in.bs_truncated) {
    add_ge(rep, "MCB_ISO >= MCB_ISO^(a,b)", in.iso.mcb, in.iso_truncated->mcb, audit_slack);
    add_ge(rep, "MCB_ISO^(a,b) >= MCB_BS^(a,b)", in.iso_truncated->mcb, in.bs_truncated->mcb, audit_slack);
    if (in.epsilon) {
      const double rhs = in.bs.mcb - *in.epsilon;
      const double margin = in.bs_truncated->mcb - rhs;
      rep.checks.push_back({"MCB_BS^(a,b) > MCB_BS - eps", in.bs_truncated->mcb, rhs, margin, margin > -audit_slack});
    }
  }
  if (in.iso_truncated) add_per_result(rep, *in.iso_truncated);
  if (in.bs_truncated) add_per_result(rep, *in.bs_truncated);
  return rep;
}

AuditReport audit_inequalities(const CaseCollection& cases, const std::optional<TruncationSpec>& truncation,
                               QsMode qs_mode) {
  AuditInputs in{decompose_ct(cases), decompose_iso(cases), decompose_bs(cases), decompose_qs(cases, qs_mode), {}, {}, {}};
  if (truncation) {
    in.iso_truncated = decompose_iso(cases, truncation);
    auto bs = decompose_bs(truncate(cases, truncation->a, truncation->b));
    bs.truncation = truncation;
    in.bs_truncated = std::move(bs);
    in.epsilon = truncation->epsilon;
  }
  return evaluate_audit(in);
}

}  // namespace crpsdecomp
