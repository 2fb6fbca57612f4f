#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crpsdecomp/step_distribution.hpp"
#include "crpsdecomp/truncation.hpp"

namespace crpsdecomp {

enum class Method { CT, ISO, BS, QS, HB, HBOrig };

std::string_view to_string(Method m);
// Accepts ct, iso, bs, qs, hb, hb-orig.
std::optional<Method> parse_method(std::string_view name);

struct DecompositionResult {
  Method method = Method::CT;
  double mean_score = 0.0;
  double mcb = 0.0;
  double dsc = 0.0;
  double unc = 0.0;
  std::size_t n = 0;
  std::optional<TruncationSpec> truncation;
  std::optional<std::size_t> qs_levels;  // set for grid-mode QS
  double approximation_error = 0.0;      // bound on quadrature error, 0 when exact
  std::vector<std::string> notes;

  double exactness_residual() const { return mean_score - (mcb - dsc + unc); }
  friend bool operator==(const DecompositionResult&, const DecompositionResult&) = default;
};

// Mean CRPS of the empirical outcome distribution issued for every case.
double uncertainty(const CaseCollection& cases);

DecompositionResult decompose_ct(const CaseCollection& cases);

DecompositionResult decompose_iso(const CaseCollection& cases, const std::optional<TruncationSpec>& truncation = {});

DecompositionResult decompose_bs(const CaseCollection& cases);

struct QsMode {
  enum class Kind { Exact, Grid, Auto };
  Kind kind = Kind::Auto;
  std::size_t levels = 1000;

  static QsMode exact() { return {Kind::Exact, 0}; }
  static QsMode grid(std::size_t levels) { return {Kind::Grid, levels}; }
  // Exact up to exact_limit cases, grid with 1000 levels above.
  static QsMode automatic() { return {Kind::Auto, 1000}; }
  static constexpr std::size_t exact_limit = 1000;
};

DecompositionResult decompose_qs(const CaseCollection& cases, QsMode mode = QsMode::automatic());

enum class HersbachVariant { Original, Modified };

struct HersbachDiagnostics {
  HersbachVariant variant = HersbachVariant::Modified;
  std::vector<double> probs;   // p_l = l/m (original) or pooled cumulative probabilities
  std::vector<double> widths;  // g
  std::vector<double> freqs;   // f
  std::vector<double> obs;     // o, original variant only (indices 0..m)
  std::size_t ensemble_size = 0;
  double ms = 0.0;

  friend bool operator==(const HersbachDiagnostics&, const HersbachDiagnostics&) = default;
};

std::pair<DecompositionResult, HersbachDiagnostics> decompose_hersbach(const CaseCollection& cases,
                                                                       HersbachVariant variant);

// Smallest m such that every cumulative probability is a multiple of 1/m, or
// nullopt if none up to max_members.
std::optional<std::size_t> ensemble_size(const StepDistribution& f, std::size_t max_members = 10000);

double ms_term(const CaseCollection& cases);

struct AuditCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs, or the negated violation for tolerance checks
  bool passed = false;

  friend bool operator==(const AuditCheck&, const AuditCheck&) = default;
};

struct AuditInputs {
  DecompositionResult ct, iso, bs, qs;
  std::optional<DecompositionResult> iso_truncated;
  std::optional<DecompositionResult> bs_truncated;
  std::optional<double> epsilon;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  std::vector<DecompositionResult> results;
  bool passed() const;
};

inline constexpr double audit_slack = 1e-9;
inline constexpr double exactness_rtol = 1e-10;

// CT, ISO, BS and QS take part in the MCB chain; the Hersbach variants do not.
bool comparable(Method m);

// Chain checks among whichever comparable methods are present, plus exactness
// and nonnegativity per result.
AuditReport audit_results(const std::vector<DecompositionResult>& results);

AuditReport evaluate_audit(const AuditInputs& inputs);

AuditReport audit_inequalities(const CaseCollection& cases, const std::optional<TruncationSpec>& truncation = {},
                               QsMode qs_mode = QsMode::automatic());

}  // namespace crpsdecomp
