#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "crpsdecomp/report.hpp"

#ifndef CRPSDECOMP_VERSION
#define CRPSDECOMP_VERSION "0.0.0"
#endif

namespace crpsdecomp {

namespace {

using nlohmann::json;

json truncation_json(const std::optional<TruncationSpec>& t) {
  if (!t) return nullptr;
  return {{"a", t->a}, {"b", t->b}, {"epsilon", t->epsilon}, {"grid_size", t->grid_size}};
}

std::optional<TruncationSpec> truncation_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return TruncationSpec{j.at("a").get<double>(), j.at("b").get<double>(), j.at("epsilon").get<double>(),
                        j.at("grid_size").get<std::size_t>()};
}

std::string_view variant_name(HersbachVariant v) { return v == HersbachVariant::Original ? "original" : "modified"; }

Method method_from(const json& j) {
  const auto name = j.get<std::string>();
  auto m = parse_method(name);
  if (!m) throw InputError(fmt::format("report: unknown method \"{}\"", name));
  return *m;
}

}  // namespace

bool ReportDocument::audit_passed() const {
  return !audit || std::all_of(audit->begin(), audit->end(), [](const AuditCheck& c) { return c.passed; });
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "table") return ReportFormat::Table;
  return std::nullopt;
}

std::string tool_version() { return CRPSDECOMP_VERSION; }

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string out;
  for (unsigned int k = 0; k < len; ++k) out += fmt::format("{:02x}", md[k]);
  return out;
}

std::string to_json(const ReportDocument& r) {
  json root;
  root["tool"] = "crpsdecomp";
  root["version"] = r.provenance.tool_version;
  root["input_sha256"] = r.provenance.input_sha256;
  root["label"] = r.provenance.label ? json(*r.provenance.label) : json(nullptr);
  root["truncation"] = truncation_json(r.provenance.truncation);
  json results = json::array();
  for (const auto& d : r.results) {
    results.push_back({{"method", std::string(to_string(d.method))},
                       {"n", d.n},
                       {"mean_score", d.mean_score},
                       {"mcb", d.mcb},
                       {"dsc", d.dsc},
                       {"unc", d.unc},
                       {"truncation", truncation_json(d.truncation)},
                       {"qs_levels", d.qs_levels ? json(*d.qs_levels) : json(nullptr)},
                       {"approximation_error", d.approximation_error},
                       {"notes", d.notes}});
  }
  root["results"] = std::move(results);
  json hb = json::array();
  for (const auto& h : r.hersbach) {
    hb.push_back({{"variant", std::string(variant_name(h.variant))},
                  {"ensemble_size", h.ensemble_size},
                  {"ms", h.ms},
                  {"probs", h.probs},
                  {"widths", h.widths},
                  {"freqs", h.freqs},
                  {"obs", h.obs}});
  }
  root["hersbach"] = std::move(hb);
  if (r.audit) {
    json checks = json::array();
    for (const auto& c : *r.audit)
      checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"margin", c.margin}, {"passed", c.passed}});
    root["audit"] = {{"passed", r.audit_passed()}, {"checks", std::move(checks)}};
  } else {
    root["audit"] = nullptr;
  }
  return root.dump(2) + "\n";
}

ReportDocument report_from_json(std::string_view text) {
  try {
    const json root = json::parse(text.begin(), text.end());
    ReportDocument r;
    r.provenance.tool_version = root.at("version").get<std::string>();
    r.provenance.input_sha256 = root.at("input_sha256").get<std::string>();
    if (!root.at("label").is_null()) r.provenance.label = root.at("label").get<std::string>();
    r.provenance.truncation = truncation_from(root.at("truncation"));
    for (const auto& j : root.at("results")) {
      DecompositionResult d;
      d.method = method_from(j.at("method"));
      d.n = j.at("n").get<std::size_t>();
      d.mean_score = j.at("mean_score").get<double>();
      d.mcb = j.at("mcb").get<double>();
      d.dsc = j.at("dsc").get<double>();
      d.unc = j.at("unc").get<double>();
      d.truncation = truncation_from(j.at("truncation"));
      if (!j.at("qs_levels").is_null()) d.qs_levels = j.at("qs_levels").get<std::size_t>();
      d.approximation_error = j.at("approximation_error").get<double>();
      d.notes = j.at("notes").get<std::vector<std::string>>();
      r.results.push_back(std::move(d));
    }
    for (const auto& j : root.at("hersbach")) {
      HersbachDiagnostics h;
      h.variant = j.at("variant").get<std::string>() == "original" ? HersbachVariant::Original : HersbachVariant::Modified;
      h.ensemble_size = j.at("ensemble_size").get<std::size_t>();
      h.ms = j.at("ms").get<double>();
      h.probs = j.at("probs").get<std::vector<double>>();
      h.widths = j.at("widths").get<std::vector<double>>();
      h.freqs = j.at("freqs").get<std::vector<double>>();
      h.obs = j.at("obs").get<std::vector<double>>();
      r.hersbach.push_back(std::move(h));
    }
    if (!root.at("audit").is_null()) {
      std::vector<AuditCheck> checks;
      for (const auto& c : root.at("audit").at("checks"))
        checks.push_back({c.at("name").get<std::string>(), c.at("lhs").get<double>(), c.at("rhs").get<double>(),
                          c.at("margin").get<double>(), c.at("passed").get<bool>()});
      r.audit = std::move(checks);
    }
    return r;
  } catch (const json::exception& e) {
    throw InputError(fmt::format("malformed report: {}", e.what()));
  }
}

std::string to_csv(const ReportDocument& r) {
  std::string out = "method,n,mean_score,mcb,dsc,unc,approximation_error,truncated\n";
  for (const auto& d : r.results)
    out += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(d.method), d.n, d.mean_score, d.mcb, d.dsc, d.unc,
                       d.approximation_error, d.truncation ? 1 : 0);
  return out;
}

std::string to_table(const ReportDocument& r) {
  std::string out;
  if (r.provenance.label) out += fmt::format("dataset  {}\n", *r.provenance.label);
  out += fmt::format("input    sha256:{}\n", r.provenance.input_sha256);
  if (const auto& t = r.provenance.truncation)
    out += fmt::format("truncated to [{}, {}], epsilon {}, grid {}\n", t->a, t->b, t->epsilon, t->grid_size);
  out += fmt::format("{:<8} {:>7} {:>24} {:>24} {:>24} {:>24}\n", "method", "n", "S", "MCB", "DSC", "UNC");
  for (const auto& d : r.results)
    out += fmt::format("{:<8} {:>7} {:>24} {:>24} {:>24} {:>24}\n", to_string(d.method), d.n, d.mean_score, d.mcb,
                       d.dsc, d.unc);
  for (const auto& d : r.results)
    for (const auto& note : d.notes) out += fmt::format("note ({}): {}\n", to_string(d.method), note);
  for (const auto& h : r.hersbach)
    out += fmt::format("hersbach {}: ensemble size {}, MS {}\n", variant_name(h.variant), h.ensemble_size, h.ms);
  if (r.audit) out += "\naudit\n" + format_audit(*r.audit);
  return out;
}

std::string serialize_report(const ReportDocument& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return to_json(report);
    case ReportFormat::Csv: return to_csv(report);
    case ReportFormat::Table: return to_table(report);
  }
  return {};
}

std::string format_audit(const std::vector<AuditCheck>& checks) {
  std::string out;
  for (const auto& c : checks)
    out += fmt::format("{} {:<46} lhs {:<24} rhs {:<24} margin {}\n", c.passed ? "PASS" : "FAIL", c.name, c.lhs, c.rhs,
                       c.margin);
  return out;
}

}  // namespace crpsdecomp
