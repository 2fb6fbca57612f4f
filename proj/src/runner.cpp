#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <future>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "crpsdecomp/isotonic.hpp"
#include "crpsdecomp/oracles.hpp"
#include "crpsdecomp/report.hpp"
#include "crpsdecomp/scoring.hpp"

namespace crpsdecomp {

namespace {

struct MethodOutput {
  DecompositionResult result;
  std::optional<HersbachDiagnostics> diagnostics;
};

MethodOutput run_method(const CaseCollection& cases, Method m, const QsMode& qs_mode) {
  try {
    switch (m) {
      case Method::CT: return {decompose_ct(cases), {}};
      case Method::ISO: return {decompose_iso(cases), {}};
      case Method::BS: return {decompose_bs(cases), {}};
      case Method::QS: return {decompose_qs(cases, qs_mode), {}};
      case Method::HB: {
        auto [r, d] = decompose_hersbach(cases, HersbachVariant::Modified);
        return {std::move(r), std::move(d)};
      }
      case Method::HBOrig: {
        auto [r, d] = decompose_hersbach(cases, HersbachVariant::Original);
        return {std::move(r), std::move(d)};
      }
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(fmt::format("{}: {}", to_string(m), e.what()));
  } catch (const std::logic_error& e) {
    throw std::logic_error(fmt::format("{}: {}", to_string(m), e.what()));
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", to_string(m), e.what()));
  }
  throw std::logic_error("unknown method");
}

unsigned thread_count(const RunOptions& options) {
  if (options.threads) return std::max(1u, *options.threads);
  if (const char* env = std::getenv("CRPSDECOMP_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return 1;
}

ReportDocument compute(const CaseCollection& cases, const RunOptions& options) {
  if (options.methods.empty()) throw std::invalid_argument("no methods requested");
  std::vector<MethodOutput> outputs;
  const unsigned threads = thread_count(options);
  if (threads <= 1) {
    for (Method m : options.methods) outputs.push_back(run_method(cases, m, options.qs_mode));
  } else {
    for (std::size_t start = 0; start < options.methods.size(); start += threads) {
      std::vector<std::future<MethodOutput>> batch;
      for (std::size_t k = start; k < std::min(options.methods.size(), start + threads); ++k)
        batch.push_back(std::async(std::launch::async, run_method, std::cref(cases), options.methods[k],
                                   std::cref(options.qs_mode)));
      for (auto& f : batch) outputs.push_back(f.get());
    }
  }
  ReportDocument report;
  std::size_t comparable_count = 0;
  for (auto& o : outputs) {
    if (comparable(o.result.method)) ++comparable_count;
    report.results.push_back(std::move(o.result));
    if (o.diagnostics) report.hersbach.push_back(std::move(*o.diagnostics));
  }
  if (comparable_count >= 2) report.audit = audit_results(report.results).checks;
  return report;
}

}  // namespace

std::vector<Method> parse_methods(std::string_view list) {
  if (list == "all") return {Method::CT, Method::ISO, Method::BS, Method::QS, Method::HB, Method::HBOrig};
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto pos = std::min(list.find(',', start), list.size());
    const auto name = list.substr(start, pos - start);
    const auto m = parse_method(name);
    if (!m) throw std::invalid_argument(fmt::format("unknown method \"{}\"", name));
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    start = pos + 1;
  }
  return out;
}

QsMode parse_qs_mode(std::string_view text) {
  if (text == "exact") return QsMode::exact();
  if (text == "auto") return QsMode::automatic();
  if (text.starts_with("grid:")) {
    const auto digits = text.substr(5);
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && n >= 2) return QsMode::grid(n);
  }
  throw std::invalid_argument(fmt::format("bad QS mode \"{}\" (exact, auto or grid:N)", text));
}

ReportDocument run_decompose(const InputDocument& doc, const RunOptions& options, std::string_view input_bytes) {
  const CaseCollection cases = to_cases(doc);
  const bool truncating = options.epsilon || options.a || options.b || doc.has_grid();
  std::optional<TruncationSpec> spec;
  std::optional<CaseCollection> truncated;
  if (truncating) {
    TruncationSpec t;
    t.epsilon = options.epsilon.value_or(default_epsilon(cases));
    t.grid_size = options.grid_size;
    if (options.a && options.b) {
      if (*options.a > *options.b)
        throw std::invalid_argument(fmt::format("truncation interval [{}, {}] is empty", *options.a, *options.b));
      t.a = *options.a;
      t.b = *options.b;
    } else {
      std::tie(t.a, t.b) = select_thresholds(cases, t.epsilon, {options.a, options.b});
    }
    std::vector<ForecastCase> rebuilt;
    rebuilt.reserve(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& f = cases[i].forecast;
      if (doc.cases[i].forecast.kind == ForecastKind::Grid && t.a < t.b)
        rebuilt.push_back({discretize_cdf([&](double x) { return cdf_at(f, x); }, t.a, t.b, t.grid_size),
                           cases[i].outcome});
      else
        rebuilt.push_back({truncate(f, t.a, t.b), cases[i].outcome});
    }
    truncated.emplace(std::move(rebuilt));
    spec = t;
  }
  ReportDocument report = compute(truncated ? *truncated : cases, options);
  for (auto& r : report.results) r.truncation = spec;
  report.provenance.tool_version = tool_version();
  report.provenance.input_sha256 =
      sha256_hex(input_bytes.empty() ? serialize_input(doc, InputFormat::Json) : std::string(input_bytes));
  report.provenance.label = doc.label;
  report.provenance.truncation = spec;
  return report;
}

ReportDocument run_decompose(const CaseCollection& cases, const RunOptions& options) {
  ReportDocument report = compute(cases, options);
  report.provenance.tool_version = tool_version();
  std::string digest_input;
  for (const auto& c : cases) {
    for (std::size_t k = 0; k < c.forecast.size(); ++k)
      digest_input += fmt::format("{}:{},", c.forecast.support()[k], c.forecast.cum_probs()[k]);
    digest_input += fmt::format(";{}\n", c.outcome);
  }
  report.provenance.input_sha256 = sha256_hex(digest_input);
  return report;
}

ValidationOutcome run_validate(const CaseCollection& cases, std::uint64_t seed) {
  ValidationOutcome out;
  out.audit = audit_inequalities(cases);
  std::mt19937_64 rng(seed);
  const std::size_t n = cases.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  oracle::OracleConfig config;
  config.seed = seed;
  config.grid_points = 200'000;
  for (std::size_t t = 0; t < std::min<std::size_t>(n, 10); ++t) {
    const std::size_t i = pick(rng);
    const auto& f = cases[i].forecast;
    const double y = cases[i].outcome;
    const double closed = crps(f, y);
    const double numeric = oracle::crps_numeric(f, y, config);
    // Each jump of the integrand costs at most one cell width in the midpoint sum.
    const double h = (std::max(f.max(), y) - std::min(f.min(), y) + 2.0) / static_cast<double>(config.grid_points);
    const double tol = static_cast<double>(f.size() + 1) * h + 1e-12;
    const double gap = std::abs(closed - numeric);
    out.oracle_checks.push_back({fmt::format("crps case {} vs numeric", i), closed, numeric, tol - gap, gap <= tol});
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min<std::size_t>(n, 8));
  std::vector<ForecastCase> sub;
  for (std::size_t i : idx) sub.push_back(cases[i]);
  const CaseCollection subset(std::move(sub));
  const auto relations = order_matrix(subset);
  for (std::size_t t = 0; t < std::min<std::size_t>(subset.size(), 3); ++t) {
    const double z = subset[t].outcome;
    std::vector<double> ind(subset.size());
    for (std::size_t k = 0; k < subset.size(); ++k) ind[k] = subset[k].outcome <= z ? 1.0 : 0.0;
    const auto fit = antitonic_binary_fit(ind, relations);
    const auto ref = oracle::dykstra_antitonic(ind, relations, config);
    double gap = 0.0;
    for (std::size_t k = 0; k < fit.size(); ++k) gap = std::max(gap, std::abs(fit[k] - ref.values[k]));
    out.oracle_checks.push_back(
        {fmt::format("antitonic fit at z = {} vs projection", z), gap, 0.0, 1e-8 - gap, ref.converged && gap <= 1e-8});
  }

  out.passed = out.audit.passed() &&
               std::all_of(out.oracle_checks.begin(), out.oracle_checks.end(), [](const AuditCheck& c) { return c.passed; });
  out.text = "audit\n" + format_audit(out.audit.checks) + "oracle cross-checks\n" + format_audit(out.oracle_checks) +
             (out.passed ? "result: PASS\n" : "result: FAIL\n");
  return out;
}

}  // namespace crpsdecomp
