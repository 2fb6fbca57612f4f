#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "crpsdecomp/decomp.hpp"
#include "crpsdecomp/scoring.hpp"
#include "fixtures.hpp"

namespace crpsdecomp {
namespace {

using fixtures::discrete;

TEST(Hersbach, OriginalOnCounterexample) {
  const auto [r, diag] = decompose_hersbach(fixtures::hersbach_counterexample(), HersbachVariant::Original);
  EXPECT_EQ(r.method, Method::HBOrig);
  EXPECT_NEAR(r.mean_score, 0.25, 1e-12);
  EXPECT_NEAR(r.mcb, 0.0, 1e-12);
  EXPECT_NEAR(r.dsc, -1.0 / 6.0, 1e-12);
  EXPECT_EQ(diag.ensemble_size, 2u);
  ASSERT_EQ(diag.obs.size(), 3u);
  EXPECT_DOUBLE_EQ(diag.obs[1], 0.5);
}

TEST(Hersbach, ModifiedOnCounterexample) {
  const auto [r, diag] = decompose_hersbach(fixtures::hersbach_counterexample(), HersbachVariant::Modified);
  EXPECT_EQ(r.method, Method::HB);
  EXPECT_NEAR(r.mcb, 0.25, 1e-12);
  EXPECT_NEAR(r.dsc, 1.0 / 12.0, 1e-12);
  EXPECT_NEAR(r.exactness_residual(), 0.0, 1e-15);
}

TEST(Hersbach, ConstantForecastHasNegativeOriginalDiscrimination) {
  // Identical forecasts, yet the original DSC is below zero: the property
  // that holds for CT, ISO, BS and QS fails here.
  const auto cases = fixtures::hersbach_counterexample();
  EXPECT_NEAR(decompose_ct(cases).dsc, 0.0, 1e-12);
  EXPECT_LT(decompose_hersbach(cases, HersbachVariant::Original).first.dsc, 0.0);
}

TEST(Hersbach, OriginalNeedsEnsembles) {
  const CaseCollection cases({{discrete({0, 1}, {1, 2}), 0.0}, {discrete({0, 1}, {1, 1}), 1.0}});
  EXPECT_NO_THROW(decompose_hersbach(cases, HersbachVariant::Original));
  const CaseCollection irrational({{discrete({0, 1}, {1, std::sqrt(2.0)}), 0.0}});
  EXPECT_THROW(decompose_hersbach(irrational, HersbachVariant::Original), std::invalid_argument);
  const CaseCollection point({{StepDistribution::point_mass(0), 0.0}});
  EXPECT_THROW(decompose_hersbach(point, HersbachVariant::Original), std::invalid_argument);
  EXPECT_NO_THROW(decompose_hersbach(irrational, HersbachVariant::Modified));
}

TEST(EnsembleSize, Values) {
  EXPECT_EQ(ensemble_size(discrete({0, 1}, {1, 1})), 2u);
  EXPECT_EQ(ensemble_size(discrete({0, 1, 2}, {1, 2, 1})), 4u);
  EXPECT_EQ(ensemble_size(StepDistribution::point_mass(3)), 1u);
  EXPECT_EQ(ensemble_size(discrete({0, 1}, {1, 2})), 3u);
  EXPECT_FALSE(ensemble_size(discrete({0, 1}, {1, 2}), 2));
  EXPECT_FALSE(ensemble_size(discrete({0, 1}, {1, std::sqrt(2.0)})));
}

TEST(MsTerm, Values) {
  EXPECT_DOUBLE_EQ(ms_term(CaseCollection({{discrete({0, 2}, {1, 3}), 1.0}})), -0.5);
  EXPECT_EQ(ms_term(CaseCollection({{discrete({0, 2}, {1, 3}), 2.0}})), 0.0);
  EXPECT_EQ(ms_term(CaseCollection({{StepDistribution::point_mass(0), 0.0}})), 0.0);
  // Below the support the whole gap counts.
  EXPECT_DOUBLE_EQ(ms_term(CaseCollection({{discrete({0, 2}, {1, 1}), -1.5}})), 1.5);
}

TEST(Hersbach, ProbabilitiesNearOneAndNearTies) {
  // An inner atom whose cumulative probability is within 1e-12 of one, and a
  // chain of probabilities each within the pooling tolerance of the next.
  const double t = 1e-13;
  const CaseCollection cases({{StepDistribution({0, 1, 2}, {0.5, 1 - t, 1}), 1.5},
                              {StepDistribution({0, 1}, {0.3, 1}), 0.5},
                              {StepDistribution({0, 1}, {0.3 + 0.8e-12, 1}), 2.0},
                              {StepDistribution({0, 1}, {0.3 + 1.6e-12, 1}), -1.0}});
  const auto [r, d] = decompose_hersbach(cases, HersbachVariant::Modified);
  EXPECT_EQ(d.probs.size(), 3u);
  double s = d.ms;
  for (std::size_t j = 0; j < d.probs.size(); ++j) {
    const double p = d.probs[j], f = d.freqs[j];
    s += d.widths[j] * ((1 - f) * p * p + f * (1 - p) * (1 - p));
  }
  EXPECT_NEAR(s, mean_crps(cases), 1e-10);
  EXPECT_GE(r.mcb, 0.0);
}

class HersbachProperty : public ::testing::TestWithParam<int> {};

TEST_P(HersbachProperty, ModifiedIdentityWithMsTerm) {
  // S = sum_j g_j [(1 - f_j) p_j^2 + f_j (1 - p_j)^2] + MS.
  std::mt19937_64 rng(GetParam());
  const auto cases = GetParam() % 2 ? fixtures::random_step_collection(rng, 40) : fixtures::random_ensembles(rng, 40, 6);
  const auto [r, d] = decompose_hersbach(cases, HersbachVariant::Modified);
  double s = d.ms;
  for (std::size_t j = 0; j < d.probs.size(); ++j) {
    const double p = d.probs[j], f = d.freqs[j];
    s += d.widths[j] * ((1 - f) * p * p + f * (1 - p) * (1 - p));
  }
  EXPECT_NEAR(s, mean_crps(cases), 1e-10);
  EXPECT_GE(r.mcb, 0.0);
  EXPECT_NEAR(r.exactness_residual(), 0.0, 1e-12);
}

TEST_P(HersbachProperty, OriginalIsExactAndNonnegative) {
  std::mt19937_64 rng(GetParam() + 50);
  const auto cases = fixtures::random_ensembles(rng, 40, 1 + GetParam() % 7 + 1);
  const auto [r, d] = decompose_hersbach(cases, HersbachVariant::Original);
  EXPECT_GE(r.mcb, 0.0);
  EXPECT_NEAR(r.exactness_residual(), 0.0, 1e-12);
  EXPECT_EQ(d.probs.size(), d.ensemble_size + 1);
}

INSTANTIATE_TEST_SUITE_P(Random, HersbachProperty, ::testing::Range(1, 21));

}  // namespace
}  // namespace crpsdecomp
