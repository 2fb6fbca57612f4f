#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crpsdecomp/decomp.hpp"
#include "crpsdecomp/io.hpp"

namespace crpsdecomp {

struct Provenance {
  std::string input_sha256;
  std::string tool_version;
  std::optional<std::string> label;
  std::optional<TruncationSpec> truncation;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ReportDocument {
  Provenance provenance;
  std::vector<DecompositionResult> results;
  std::vector<HersbachDiagnostics> hersbach;
  std::optional<std::vector<AuditCheck>> audit;

  bool audit_passed() const;
  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

enum class ReportFormat { Json, Csv, Table };

std::optional<ReportFormat> parse_report_format(std::string_view name);

std::string tool_version();
std::string sha256_hex(std::string_view bytes);

std::string to_json(const ReportDocument& report);
ReportDocument report_from_json(std::string_view text);
std::string to_csv(const ReportDocument& report);
std::string to_table(const ReportDocument& report);
std::string serialize_report(const ReportDocument& report, ReportFormat format);

struct RunOptions {
  std::vector<Method> methods;
  std::optional<double> epsilon;
  std::optional<double> a;
  std::optional<double> b;
  std::size_t grid_size = 5000;
  QsMode qs_mode = QsMode::automatic();
  // Methods run concurrently on this many threads; unset reads CRPSDECOMP_THREADS, else 1.
  std::optional<unsigned> threads;
};

// Parses "ct,iso,..." or "all".
std::vector<Method> parse_methods(std::string_view list);

// "exact", "auto" or "grid:N".
QsMode parse_qs_mode(std::string_view text);

// Truncates when any of epsilon, a, b is set, and always for grid forecasts:
// missing thresholds come from select_thresholds with epsilon defaulting to
// the mean score / 1000, and grid forecasts are re-discretized on grid_size
// equidistant points of [a, b]. The audit is attached when at least two of
// CT, ISO, BS, QS are requested.
ReportDocument run_decompose(const InputDocument& doc, const RunOptions& options, std::string_view input_bytes = {});

ReportDocument run_decompose(const CaseCollection& cases, const RunOptions& options);

std::string format_audit(const std::vector<AuditCheck>& checks);

struct ValidationOutcome {
  AuditReport audit;
  std::vector<AuditCheck> oracle_checks;
  std::string text;
  bool passed = false;
};

// Full audit plus cross-checks against the brute-force oracles on a seeded
// subsample of cases.
ValidationOutcome run_validate(const CaseCollection& cases, std::uint64_t seed = 20240917);

}  // namespace crpsdecomp
