#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "crpsdecomp/decomp.hpp"
#include "crpsdecomp/scoring.hpp"
#include "crpsdecomp/truncation.hpp"
#include "fixtures.hpp"

namespace crpsdecomp {
namespace {

// Keeps the cumulative probabilities bit for bit: tied forecast probabilities
// pool in the BS fit, so rebuilding them from mass differences could split a tie.
StepDistribution affine(const StepDistribution& f, double scale, double shift) {
  std::vector<double> pts;
  for (double x : f.support()) pts.push_back(scale * x + shift);
  return StepDistribution(pts, {f.cum_probs().begin(), f.cum_probs().end()});
}

CaseCollection affine(const CaseCollection& cases, double scale, double shift) {
  std::vector<ForecastCase> out;
  for (const auto& c : cases) out.push_back({affine(c.forecast, scale, shift), scale * c.outcome + shift});
  return CaseCollection(std::move(out));
}

std::vector<DecompositionResult> all_methods(const CaseCollection& cases) {
  return {decompose_ct(cases), decompose_iso(cases), decompose_bs(cases), decompose_qs(cases, QsMode::exact()),
          decompose_hersbach(cases, HersbachVariant::Modified).first};
}

CaseCollection draw(int seed) {
  std::mt19937_64 rng(seed);
  switch (seed % 3) {
    case 0: return fixtures::random_step_collection(rng, 50);
    case 1: return fixtures::random_ensembles(rng, 60, 4);
    default: return fixtures::random_grid_collection(rng, 25, 121);
  }
}

class DecompositionProperty : public ::testing::TestWithParam<int> {};

TEST_P(DecompositionProperty, ExactAndNonnegative) {
  const auto cases = draw(GetParam());
  const double s = mean_crps(cases), u = uncertainty(cases);
  for (const auto& r : all_methods(cases)) {
    SCOPED_TRACE(std::string(to_string(r.method)));
    EXPECT_NEAR(r.mean_score, s, 1e-12 * std::max(1.0, s));
    EXPECT_NEAR(r.unc, u, 1e-10 * std::max(1.0, u));
    EXPECT_LE(std::abs(r.exactness_residual()), exactness_rtol * std::max(1.0, s));
    EXPECT_GE(r.mcb, -1e-12);
    if (r.method != Method::HB) EXPECT_GE(r.dsc, -1e-12);
  }
}

TEST_P(DecompositionProperty, MiscalibrationChain) {
  const auto cases = draw(GetParam());
  const auto ct = decompose_ct(cases), iso = decompose_iso(cases), bs = decompose_bs(cases),
             qs = decompose_qs(cases, QsMode::exact());
  EXPECT_GE(ct.mean_score + 1e-12, ct.mcb);
  EXPECT_GE(ct.mcb + 1e-10, iso.mcb);
  EXPECT_GE(iso.mcb + 1e-10, bs.mcb);
  EXPECT_GE(iso.mcb + 1e-10, qs.mcb);
}

TEST_P(DecompositionProperty, TruncatedChain) {
  std::mt19937_64 rng(GetParam() + 1000);
  const auto cases = fixtures::random_grid_collection(rng, 25, 121);
  const double eps = default_epsilon(cases);
  const auto [a, b] = select_thresholds(cases, eps);
  const TruncationSpec t{a, b, eps};
  const auto iso = decompose_iso(cases), iso_t = decompose_iso(cases, t);
  const auto bs = decompose_bs(cases), bs_t = decompose_bs(truncate(cases, a, b));
  EXPECT_GE(iso.mcb + 1e-10, iso_t.mcb);
  EXPECT_GE(iso_t.mcb + 1e-10, bs_t.mcb);
  EXPECT_GT(bs_t.mcb, bs.mcb - eps);
  ASSERT_TRUE(iso_t.truncation);
  EXPECT_EQ(iso_t.truncation->a, a);
  EXPECT_TRUE(audit_inequalities(cases, t).passed());
}

TEST_P(DecompositionProperty, PermutationInvariant) {
  const auto cases = draw(GetParam());
  std::vector<ForecastCase> raw(cases.begin(), cases.end());
  std::mt19937_64 rng(GetParam() + 2000);
  std::shuffle(raw.begin(), raw.end(), rng);
  const auto a = all_methods(cases), b = all_methods(CaseCollection(raw));
  for (std::size_t k = 0; k < a.size(); ++k) {
    SCOPED_TRACE(std::string(to_string(a[k].method)));
    EXPECT_NEAR(a[k].mcb, b[k].mcb, 1e-10);
    EXPECT_NEAR(a[k].dsc, b[k].dsc, 1e-10);
    EXPECT_NEAR(a[k].unc, b[k].unc, 1e-12);
  }
}

TEST_P(DecompositionProperty, UncertaintyIgnoresForecasts) {
  const auto cases = draw(GetParam());
  std::vector<ForecastCase> swapped(cases.begin(), cases.end());
  std::mt19937_64 rng(GetParam() + 3000);
  for (auto& c : swapped) c.forecast = fixtures::random_step_distribution(rng);
  EXPECT_NEAR(uncertainty(CaseCollection(swapped)), uncertainty(cases), 1e-12);
}

TEST_P(DecompositionProperty, TranslationInvariantAndScaleEquivariant) {
  const auto cases = draw(GetParam());
  const double scale = 2.0, shift = -3.5;
  const auto a = all_methods(cases), b = all_methods(affine(cases, scale, shift));
  for (std::size_t k = 0; k < a.size(); ++k) {
    SCOPED_TRACE(std::string(to_string(a[k].method)));
    EXPECT_NEAR(b[k].mcb, scale * a[k].mcb, 1e-9);
    EXPECT_NEAR(b[k].dsc, scale * a[k].dsc, 1e-9);
    EXPECT_NEAR(b[k].unc, scale * a[k].unc, 1e-9);
  }
}

TEST_P(DecompositionProperty, MarginalForecastIsCalibrated) {
  // Issuing the marginal to every case is calibrated in every sense.
  const auto cases = draw(GetParam());
  const auto m = marginal_distribution(cases);
  std::vector<ForecastCase> raw;
  for (const auto& c : cases) raw.push_back({m, c.outcome});
  for (const auto& r : all_methods(CaseCollection(raw))) {
    if (r.method == Method::HB) continue;
    SCOPED_TRACE(std::string(to_string(r.method)));
    EXPECT_NEAR(r.mcb, 0.0, 1e-10);
    EXPECT_NEAR(r.dsc, 0.0, 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Random, DecompositionProperty, ::testing::Range(1, 31));

TEST(IsoVersusCt, StrictOnTheThreePointSampleForAnyLabels) {
  for (double y3 : {2.0, 5.0, 40.0}) {
    const auto cases = fixtures::three_point_sample(0.0, 1.0, y3);
    EXPECT_LT(decompose_iso(cases).mcb, decompose_ct(cases).mcb) << y3;
  }
}

}  // namespace
}  // namespace crpsdecomp
