#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "crpsdecomp/io.hpp"
#include "crpsdecomp/report.hpp"
#include "fixtures.hpp"

namespace crpsdecomp {
namespace {

InputDocument two_atom_doc() {
  InputDocument doc;
  doc.label = "two atoms";
  doc.cases.push_back({{ForecastKind::Discrete, {1, 2}, {0.5, 0.5}}, 3});
  doc.cases.push_back({{ForecastKind::Discrete, {0, 3}, {0.5, 0.5}}, 0});
  return doc;
}

const DecompositionResult& find(const ReportDocument& r, Method m) {
  for (const auto& d : r.results)
    if (d.method == m) return d;
  throw std::out_of_range("method missing from report");
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(ParseMethods, ListsAndAll) {
  EXPECT_EQ(parse_methods("ct,iso"), (std::vector<Method>{Method::CT, Method::ISO}));
  EXPECT_EQ(parse_methods("qs,qs,hb-orig"), (std::vector<Method>{Method::QS, Method::HBOrig}));
  EXPECT_EQ(parse_methods("all").size(), 6u);
  EXPECT_THROW(parse_methods("ct,,iso"), std::invalid_argument);
  EXPECT_THROW(parse_methods("ct,mse"), std::invalid_argument);
}

TEST(ParseQsMode, Forms) {
  EXPECT_EQ(parse_qs_mode("exact").kind, QsMode::Kind::Exact);
  EXPECT_EQ(parse_qs_mode("auto").kind, QsMode::Kind::Auto);
  const auto g = parse_qs_mode("grid:250");
  EXPECT_EQ(g.kind, QsMode::Kind::Grid);
  EXPECT_EQ(g.levels, 250u);
  for (const char* bad : {"grid:", "grid:1", "grid:10x", "fine"}) EXPECT_THROW(parse_qs_mode(bad), std::invalid_argument) << bad;
}

TEST(ReportFormatNames, Parse) {
  EXPECT_EQ(parse_report_format("table"), ReportFormat::Table);
  EXPECT_FALSE(parse_report_format("yaml"));
}

TEST(RunDecompose, TwoAtomExample) {
  RunOptions opt;
  opt.methods = parse_methods("all");
  opt.qs_mode = QsMode::exact();
  const auto r = run_decompose(two_atom_doc(), opt, "bytes");
  EXPECT_EQ(r.provenance.input_sha256, sha256_hex("bytes"));
  EXPECT_EQ(r.provenance.label, "two atoms");
  EXPECT_FALSE(r.provenance.truncation);
  EXPECT_DOUBLE_EQ(find(r, Method::CT).mcb, 1.0);
  EXPECT_NEAR(find(r, Method::ISO).mcb, 1.0, 1e-12);
  EXPECT_NEAR(find(r, Method::BS).mcb, 0.5, 1e-12);
  EXPECT_NEAR(find(r, Method::QS).mcb, 0.625, 1e-12);
  EXPECT_NEAR(find(r, Method::HB).mcb, 0.125, 1e-12);
  ASSERT_EQ(r.hersbach.size(), 2u);
  ASSERT_TRUE(r.audit);
  EXPECT_TRUE(r.audit_passed());
}

TEST(RunDecompose, HersbachCounterexample) {
  RunOptions opt;
  opt.methods = {Method::HBOrig, Method::HB};
  const auto r = run_decompose(fixtures::hersbach_counterexample(), opt);
  EXPECT_NEAR(find(r, Method::HBOrig).dsc, -1.0 / 6.0, 1e-12);
  EXPECT_NEAR(find(r, Method::HB).mcb, 0.25, 1e-12);
  EXPECT_FALSE(r.audit);
}

TEST(RunDecompose, SingleCaseCt) {
  RunOptions opt;
  opt.methods = {Method::CT};
  const CaseCollection one({{fixtures::discrete({0, 1}, {1, 1}), 1.0}});
  const auto r = run_decompose(one, opt);
  ASSERT_EQ(r.results.size(), 1u);
  EXPECT_DOUBLE_EQ(r.results[0].mcb, 0.25);
  EXPECT_EQ(r.results[0].unc, 0.0);
  EXPECT_EQ(r.results[0].n, 1u);
}

TEST(RunDecompose, NoMethodsIsAnError) {
  EXPECT_THROW(run_decompose(fixtures::two_atoms(), RunOptions{}), std::invalid_argument);
}

TEST(RunDecompose, ExplicitTruncation) {
  RunOptions opt;
  opt.methods = {Method::CT, Method::ISO};
  opt.a = 0.5;
  opt.b = 2.5;
  const auto r = run_decompose(two_atom_doc(), opt);
  ASSERT_TRUE(r.provenance.truncation);
  EXPECT_EQ(r.provenance.truncation->a, 0.5);
  for (const auto& d : r.results) EXPECT_TRUE(d.truncation);
  // Only forecasts are clamped: (d1 + d2)/2 against 3 scores 5/4, (d0.5 + d2.5)/2 against 0 scores 1.
  EXPECT_DOUBLE_EQ(find(r, Method::CT).mean_score, 0.5 * (1.25 + 1.0));
  opt.a = 3.0;
  EXPECT_THROW(run_decompose(two_atom_doc(), opt), std::invalid_argument);
}

TEST(RunDecompose, GridInputIsRediscretized) {
  InputDocument doc;
  for (int i = 0; i < 6; ++i) {
    ForecastRecord f{ForecastKind::Grid, {}, {}};
    for (int k = 0; k <= 40; ++k) {
      f.points.push_back(-4.0 + 0.2 * k);
      f.values.push_back(std::min(1.0, 0.025 * k + 0.01 * i));
    }
    doc.cases.push_back({f, 0.3 * i - 1.0});
  }
  RunOptions opt;
  opt.methods = {Method::CT, Method::ISO, Method::BS};
  opt.grid_size = 300;
  const auto r = run_decompose(doc, opt);
  ASSERT_TRUE(r.provenance.truncation);
  EXPECT_EQ(r.provenance.truncation->grid_size, 300u);
  EXPECT_LE(r.provenance.truncation->a, -1.0);
  EXPECT_GE(r.provenance.truncation->b, 0.5);
  EXPECT_TRUE(r.audit_passed());
}

TEST(RunDecompose, ThreadCountDoesNotChangeResults) {
  std::mt19937_64 rng(10);
  const auto cases = fixtures::random_ensembles(rng, 80, 5);
  RunOptions opt;
  opt.methods = parse_methods("all");
  opt.threads = 1;
  const auto serial = run_decompose(cases, opt);
  opt.threads = 4;
  EXPECT_EQ(run_decompose(cases, opt), serial);
}

TEST(ReportJson, RoundTrip) {
  RunOptions opt;
  opt.methods = parse_methods("all");
  opt.epsilon = 1e-4;
  std::mt19937_64 rng(12);
  const auto cases = fixtures::random_ensembles(rng, 40, 4);
  InputDocument doc;
  for (const auto& c : cases) {
    ForecastRecord f{ForecastKind::Discrete, {c.forecast.support().begin(), c.forecast.support().end()}, {}};
    double prev = 0;
    for (double p : c.forecast.cum_probs()) {
      f.values.push_back(p - prev);
      prev = p;
    }
    doc.cases.push_back({f, c.outcome});
  }
  const auto r = run_decompose(doc, opt);
  EXPECT_EQ(report_from_json(to_json(r)), r);
}

TEST(ReportJson, MalformedIsAnInputError) {
  EXPECT_THROW(report_from_json("{}"), InputError);
  EXPECT_THROW(report_from_json("not json"), InputError);
}

TEST(ReportText, CsvAndTable) {
  RunOptions opt;
  opt.methods = {Method::CT, Method::BS};
  const auto r = run_decompose(two_atom_doc(), opt);
  const auto csv = to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,n,mean_score,mcb,dsc,unc,approximation_error,truncated");
  EXPECT_NE(csv.find("\nct,2,1,1,0.75,0.75,0,0\n"), std::string::npos);
  const auto table = to_table(r);
  EXPECT_NE(table.find("dataset  two atoms"), std::string::npos);
  EXPECT_NE(table.find("PASS"), std::string::npos);
}

TEST(Validate, PassesOnTheThreePointSample) {
  const auto v = run_validate(fixtures::three_point_sample());
  EXPECT_TRUE(v.passed) << v.text;
  EXPECT_FALSE(v.oracle_checks.empty());
  EXPECT_NE(v.text.find("result: PASS"), std::string::npos);
}

}  // namespace
}  // namespace crpsdecomp
