#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "crpsdecomp/io.hpp"
#include "crpsdecomp/plot.hpp"
#include "crpsdecomp/report.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_input = 2;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw crpsdecomp::InputError(fmt::format("cannot write {}", path));
  out << text;
}

crpsdecomp::InputFormat input_format(const std::string& name, const std::string& path) {
  if (!name.empty()) {
    if (auto f = crpsdecomp::parse_input_format(name)) return *f;
    throw crpsdecomp::InputError(fmt::format("unknown input format \"{}\"", name));
  }
  return path.ends_with(".csv") ? crpsdecomp::InputFormat::Csv : crpsdecomp::InputFormat::Json;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean CRPS decompositions into miscalibration, discrimination and uncertainty"};
  app.require_subcommand(1);

  std::string input, format, methods = "all", qs_mode = "auto", output, output_format = "table";
  std::optional<double> epsilon, lower, upper;
  std::size_t grid_size = 5000;
  std::optional<unsigned> threads;
  auto* dec = app.add_subcommand("decompose", "Decompose the mean CRPS of a forecast collection");
  dec->add_option("--input", input, "Input file (JSON or CSV)")->required();
  dec->add_option("--format", format, "Input format: json or csv (default from extension)");
  dec->add_option("--methods", methods, "Comma-separated list of ct, iso, bs, qs, hb, hb-orig, or all");
  dec->add_option("--epsilon", epsilon, "Tail error tolerance for truncation");
  dec->add_option("--a", lower, "Lower truncation threshold");
  dec->add_option("--b", upper, "Upper truncation threshold");
  dec->add_option("--grid-size", grid_size, "Grid points used to re-discretize grid forecasts");
  dec->add_option("--qs-mode", qs_mode, "exact, auto or grid:N");
  dec->add_option("--output", output, "Report path (default stdout)");
  dec->add_option("--output-format", output_format, "json, csv or table");
  dec->add_option("--threads", threads, "Run methods concurrently");

  std::vector<std::string> reports;
  std::string svg_path;
  bool mcb_horizontal = false;
  auto* plot = app.add_subcommand("plot", "Render an MCB-DSC plot from JSON reports");
  plot->add_option("--input", reports, "Report files written with --output-format json")->required();
  plot->add_option("--output", svg_path, "SVG path")->required();
  plot->add_flag("--mcb-horizontal", mcb_horizontal, "Put MCB on the horizontal axis");

  std::string vinput, vformat;
  std::uint64_t seed = 20240917;
  auto* val = app.add_subcommand("validate", "Audit the inequality chain and cross-check against oracles");
  val->add_option("--input", vinput, "Input file (JSON or CSV)")->required();
  val->add_option("--format", vformat, "Input format: json or csv");
  val->add_option("--seed", seed, "Seed for the oracle subsample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*dec) {
      const auto fmt_in = input_format(format, input);
      const auto out_fmt = crpsdecomp::parse_report_format(output_format);
      if (!out_fmt) throw crpsdecomp::InputError(fmt::format("unknown output format \"{}\"", output_format));
      const std::string bytes = crpsdecomp::read_file(input);
      const auto doc = crpsdecomp::parse_input_document(bytes, fmt_in);
      crpsdecomp::RunOptions opts;
      opts.methods = crpsdecomp::parse_methods(methods);
      opts.epsilon = epsilon;
      opts.a = lower;
      opts.b = upper;
      opts.grid_size = grid_size;
      opts.qs_mode = crpsdecomp::parse_qs_mode(qs_mode);
      opts.threads = threads;
      const auto report = crpsdecomp::run_decompose(doc, opts, bytes);
      write_output(output, crpsdecomp::serialize_report(report, *out_fmt));
      return report.audit_passed() ? exit_ok : exit_failed;
    }
    if (*plot) {
      std::vector<crpsdecomp::ReportDocument> docs;
      for (const auto& path : reports) docs.push_back(crpsdecomp::report_from_json(crpsdecomp::read_file(path)));
      crpsdecomp::PlotOptions opts;
      opts.mcb_axis = mcb_horizontal ? crpsdecomp::McbAxis::Horizontal : crpsdecomp::McbAxis::Vertical;
      write_output(svg_path, crpsdecomp::render_mcb_dsc_svg(docs, opts));
      return exit_ok;
    }
    if (*val) {
      const auto cases = crpsdecomp::parse_input(crpsdecomp::read_file(vinput), input_format(vformat, vinput));
      const auto outcome = crpsdecomp::run_validate(cases, seed);
      std::cout << outcome.text;
      return outcome.passed ? exit_ok : exit_failed;
    }
  } catch (const crpsdecomp::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failed;
  }
  return exit_ok;
}
