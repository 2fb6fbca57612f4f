#include "crpsdecomp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace crpsdecomp {

namespace {

using nlohmann::json;

const json& member(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(fmt::format("{}: missing field \"{}\"", where, key));
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(fmt::format("{}: expected a number, got {}", where, v.type_name()));
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InputError(fmt::format("{}: value is not finite", where));
  return x;
}

std::vector<double> numbers(const json& obj, const char* key, const std::string& where) {
  const std::string field = fmt::format("{}.{}", where, key);
  const json& arr = member(obj, key, where);
  if (!arr.is_array()) throw InputError(fmt::format("{}: expected an array", field));
  if (arr.empty()) throw InputError(fmt::format("{}: array is empty", field));
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k) out.push_back(number(arr[k], fmt::format("{}[{}]", field, k)));
  return out;
}

void check_record(const ForecastRecord& r, const std::string& where) {
  switch (r.kind) {
    case ForecastKind::Ensemble:
      if (r.points.empty()) throw InputError(fmt::format("{}: ensemble is empty", where));
      break;
    case ForecastKind::Discrete: {
      if (r.points.size() != r.values.size())
        throw InputError(fmt::format("{}: {} points but {} masses", where, r.points.size(), r.values.size()));
      double total = 0.0;
      for (std::size_t k = 0; k < r.values.size(); ++k) {
        if (r.values[k] < 0.0) throw InputError(fmt::format("{}.masses[{}]: negative mass {}", where, k, r.values[k]));
        total += r.values[k];
      }
      if (!(total > 0.0)) throw InputError(fmt::format("{}: masses sum to zero", where));
      break;
    }
    case ForecastKind::Grid:
      if (r.points.size() != r.values.size())
        throw InputError(fmt::format("{}: {} grid points but {} cdf values", where, r.points.size(), r.values.size()));
      for (std::size_t k = 0; k < r.points.size(); ++k) {
        if (k > 0 && !(r.points[k] > r.points[k - 1]))
          throw InputError(fmt::format("{}.x[{}]: grid not strictly increasing", where, k));
        if (r.values[k] < 0.0 || r.values[k] > 1.0)
          throw InputError(fmt::format("{}.cdf[{}]: value {} outside [0, 1]", where, k, r.values[k]));
        if (k > 0 && r.values[k] < r.values[k - 1])
          throw InputError(fmt::format("{}.cdf[{}]: cdf decreases from {} to {}", where, k, r.values[k - 1], r.values[k]));
      }
      break;
  }
}

InputDocument parse_json(std::string_view bytes) {
  json root;
  try {
    root = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("invalid JSON at byte {}: {}", e.byte, e.what()));
  }
  if (!root.is_object()) throw InputError("top level must be an object");
  InputDocument doc;
  if (auto it = root.find("label"); it != root.end() && !it->is_null()) {
    if (!it->is_string()) throw InputError("label: expected a string");
    doc.label = it->get<std::string>();
  }
  const json& cases = member(root, "cases", "document");
  if (!cases.is_array()) throw InputError("cases: expected an array");
  if (cases.empty()) throw InputError("cases: no cases");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string where = fmt::format("cases[{}]", i);
    const json& c = cases[i];
    if (!c.is_object()) throw InputError(fmt::format("{}: expected an object", where));
    const std::string fwhere = where + ".forecast";
    const json& f = member(c, "forecast", where);
    if (!f.is_object()) throw InputError(fmt::format("{}: expected an object", fwhere));
    const json& kind = member(f, "kind", fwhere);
    if (!kind.is_string()) throw InputError(fmt::format("{}.kind: expected a string", fwhere));
    const auto k = kind.get<std::string>();
    CaseRecord rec;
    if (k == "discrete") {
      rec.forecast = {ForecastKind::Discrete, numbers(f, "points", fwhere), numbers(f, "masses", fwhere)};
    } else if (k == "ensemble") {
      rec.forecast = {ForecastKind::Ensemble, numbers(f, "members", fwhere), {}};
    } else if (k == "grid") {
      rec.forecast = {ForecastKind::Grid, numbers(f, "x", fwhere), numbers(f, "cdf", fwhere)};
    } else {
      throw InputError(fmt::format("{}.kind: unknown kind \"{}\" (discrete, ensemble or grid)", fwhere, k));
    }
    check_record(rec.forecast, fwhere);
    rec.outcome = number(member(c, "outcome", where), where + ".outcome");
    doc.cases.push_back(std::move(rec));
  }
  return doc;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

InputDocument parse_csv(std::string_view bytes) {
  InputDocument doc;
  std::size_t width = 0;
  std::size_t row = 0;
  bool first = true;
  for (auto line : split(bytes, '\n')) {
    ++row;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    if (first) {
      first = false;
      if (!to_double(cells[0])) continue;  // header
    }
    if (cells.size() < 2)
      throw InputError(fmt::format("row {}: need at least one member and an outcome column", row));
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw InputError(fmt::format("row {}: {} columns, expected {}", row, cells.size(), width));
    CaseRecord rec;
    rec.forecast.kind = ForecastKind::Ensemble;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = to_double(cells[c]);
      if (!v) throw InputError(fmt::format("row {}, column {}: \"{}\" is not a finite number", row, c + 1, trim(cells[c])));
      if (c + 1 == cells.size())
        rec.outcome = *v;
      else
        rec.forecast.points.push_back(*v);
    }
    doc.cases.push_back(std::move(rec));
  }
  if (doc.cases.empty()) throw InputError("CSV input has no data rows");
  return doc;
}

}  // namespace

bool InputDocument::has_grid() const {
  return std::any_of(cases.begin(), cases.end(), [](const CaseRecord& c) { return c.forecast.kind == ForecastKind::Grid; });
}

InputDocument parse_input_document(std::string_view bytes, InputFormat format) {
  return format == InputFormat::Json ? parse_json(bytes) : parse_csv(bytes);
}

std::string serialize_input(const InputDocument& doc, InputFormat format) {
  if (format == InputFormat::Csv) {
    std::string out;
    const std::size_t m = doc.cases.empty() ? 0 : doc.cases[0].forecast.points.size();
    for (std::size_t i = 0; i < doc.cases.size(); ++i) {
      const auto& c = doc.cases[i];
      if (c.forecast.kind != ForecastKind::Ensemble || c.forecast.points.size() != m)
        throw std::invalid_argument(fmt::format("case {}: CSV holds only ensembles of a common size", i));
      for (double x : c.forecast.points) out += fmt::format("{},", x);
      out += fmt::format("{}\n", c.outcome);
    }
    return out;
  }
  json root = json::object();
  if (doc.label) root["label"] = *doc.label;
  json cases = json::array();
  for (const auto& c : doc.cases) {
    json f;
    switch (c.forecast.kind) {
      case ForecastKind::Discrete:
        f = {{"kind", "discrete"}, {"points", c.forecast.points}, {"masses", c.forecast.values}};
        break;
      case ForecastKind::Ensemble:
        f = {{"kind", "ensemble"}, {"members", c.forecast.points}};
        break;
      case ForecastKind::Grid:
        f = {{"kind", "grid"}, {"x", c.forecast.points}, {"cdf", c.forecast.values}};
        break;
    }
    cases.push_back({{"forecast", std::move(f)}, {"outcome", c.outcome}});
  }
  root["cases"] = std::move(cases);
  return root.dump(2) + "\n";
}

StepDistribution to_distribution(const ForecastRecord& r) {
  switch (r.kind) {
    case ForecastKind::Ensemble:
      return make_ensemble(r.points);
    case ForecastKind::Discrete:
      return make_step_distribution(r.points, r.values);
    case ForecastKind::Grid: {
      std::vector<double> pts, ms;
      const std::size_t n = r.points.size();
      for (std::size_t k = 0; k < n; ++k) {
        const double prev = k == 0 ? 0.0 : r.values[k - 1];
        const double w = k + 1 == n ? 1.0 - prev : r.values[k] - prev;
        if (w > 0.0) {
          pts.push_back(r.points[k]);
          ms.push_back(w);
        }
      }
      return make_step_distribution(pts, ms);
    }
  }
  throw std::logic_error("unknown forecast kind");
}

CaseCollection to_cases(const InputDocument& doc) {
  std::vector<ForecastCase> cases;
  cases.reserve(doc.cases.size());
  for (std::size_t i = 0; i < doc.cases.size(); ++i) {
    try {
      cases.push_back({to_distribution(doc.cases[i].forecast), doc.cases[i].outcome});
    } catch (const std::invalid_argument& e) {
      throw InputError(fmt::format("cases[{}].forecast: {}", i, e.what()));
    }
  }
  return CaseCollection(std::move(cases));
}

CaseCollection parse_input(std::string_view bytes, InputFormat format) {
  return to_cases(parse_input_document(bytes, format));
}

std::optional<InputFormat> parse_input_format(std::string_view name) {
  if (name == "json") return InputFormat::Json;
  if (name == "csv") return InputFormat::Csv;
  return std::nullopt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace crpsdecomp
