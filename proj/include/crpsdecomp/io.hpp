#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crpsdecomp/step_distribution.hpp"

namespace crpsdecomp {

// Malformed or inconsistent input; the CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InputFormat { Json, Csv };

enum class ForecastKind { Discrete, Ensemble, Grid };

struct ForecastRecord {
  ForecastKind kind = ForecastKind::Discrete;
  std::vector<double> points;  // discrete points, ensemble members or grid x
  std::vector<double> values;  // discrete masses or grid CDF values; empty for ensembles

  friend bool operator==(const ForecastRecord&, const ForecastRecord&) = default;
};

struct CaseRecord {
  ForecastRecord forecast;
  double outcome = 0.0;

  friend bool operator==(const CaseRecord&, const CaseRecord&) = default;
};

struct InputDocument {
  std::optional<std::string> label;
  std::vector<CaseRecord> cases;

  bool has_grid() const;
  friend bool operator==(const InputDocument&, const InputDocument&) = default;
};

// JSON: {"label": ..., "cases": [{"forecast": {"kind": "discrete", "points": [...], "masses": [...]}
//   | {"kind": "ensemble", "members": [...]} | {"kind": "grid", "x": [...], "cdf": [...]}, "outcome": y}]}
// CSV: one ensemble per row, "x1,...,xm,outcome", optional header row, fixed m.
InputDocument parse_input_document(std::string_view bytes, InputFormat format);

// CSV output requires every case to be an ensemble of the same size.
std::string serialize_input(const InputDocument& doc, InputFormat format);

// Ensembles become equal-weight distributions. A grid puts F(x_0) at x_0,
// F(x_k) - F(x_{k-1}) at x_k and the remainder to 1 at the last point.
StepDistribution to_distribution(const ForecastRecord& record);

CaseCollection to_cases(const InputDocument& doc);

CaseCollection parse_input(std::string_view bytes, InputFormat format);

std::optional<InputFormat> parse_input_format(std::string_view name);

std::string read_file(const std::string& path);

}  // namespace crpsdecomp
