#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "crpsdecomp/order.hpp"
#include "fixtures.hpp"
#include "poset.hpp"

namespace crpsdecomp {
namespace {

using fixtures::discrete;

TEST(StochasticOrder, PointMasses) {
  EXPECT_EQ(stochastic_order(StepDistribution::point_mass(0), StepDistribution::point_mass(1)), Relation::Leq);
  EXPECT_EQ(stochastic_order(StepDistribution::point_mass(1), StepDistribution::point_mass(0)), Relation::Geq);
}

TEST(StochasticOrder, TwoAtomForecastsDoNotOrder) {
  EXPECT_EQ(stochastic_order(discrete({1, 2}, {1, 1}), discrete({0, 3}, {1, 1})), Relation::Incomparable);
}

TEST(StochasticOrder, Reflexive) {
  const auto f = discrete({0, 1, 5}, {1, 2, 1});
  EXPECT_EQ(stochastic_order(f, f), Relation::Equal);
}

TEST(OrderMatrix, IdenticalForecasts) {
  const auto f = discrete({0, 1}, {1, 1});
  const CaseCollection cases({{f, 0.0}, {f, 1.0}, {f, 2.0}});
  const auto m = order_matrix(cases);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m(i, j), Relation::Equal);
}

TEST(OrderMatrix, ThreePointForecastsAreTotallyOrdered) {
  // The forecasts put mass 1/2 on y1, y2, y3 in turn; comparing the CDFs on
  // the pooled support gives F1 <= F2 <= F3 by hand.
  const auto cases = fixtures::three_point_sample();
  const auto m = order_matrix(cases);
  EXPECT_EQ(m(0, 10), Relation::Leq);
  EXPECT_EQ(m(10, 20), Relation::Leq);
  EXPECT_EQ(m(0, 20), Relation::Leq);
  EXPECT_EQ(m(20, 0), Relation::Geq);
  EXPECT_EQ(m(0, 9), Relation::Equal);
}

TEST(OrderMatrix, TwoAtomForecastsIncomparable) {
  const auto m = order_matrix(fixtures::two_atoms());
  EXPECT_EQ(m(0, 1), Relation::Incomparable);
  EXPECT_EQ(m(1, 0), Relation::Incomparable);
  EXPECT_EQ(m(0, 0), Relation::Equal);
}

TEST(OrderMatrix, ValidateNamesBrokenInvariants) {
  OrderRelationMatrix m(3);
  m.set(0, 1, Relation::Leq);
  m.set(1, 2, Relation::Leq);
  EXPECT_THROW(m.validate(), std::invalid_argument);  // 0 <= 2 missing
  m.set(0, 2, Relation::Leq);
  EXPECT_NO_THROW(m.validate());
}

TEST(OrderMatrix, MirrorHelpers) {
  EXPECT_EQ(mirror(Relation::Leq), Relation::Geq);
  EXPECT_EQ(mirror(Relation::Equal), Relation::Equal);
  EXPECT_EQ(to_string(Relation::Incomparable), "INCOMPARABLE");
}

class OrderProperty : public ::testing::TestWithParam<int> {};

TEST_P(OrderProperty, TransitiveOnRandomCollections) {
  std::mt19937_64 rng(GetParam());
  const auto cases = fixtures::random_step_collection(rng, 20);
  const auto m = order_matrix(cases);
  const std::size_t n = m.size();
  auto below = [&](std::size_t i, std::size_t j) { return m(i, j) == Relation::Leq || m(i, j) == Relation::Equal; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (below(i, j) && below(j, k)) EXPECT_TRUE(below(i, k)) << i << " " << j << " " << k;
  EXPECT_NO_THROW(m.validate());
}

TEST_P(OrderProperty, CdfAndQuantileCharacterizationsAgree) {
  std::mt19937_64 rng(GetParam() + 1000);
  const auto f = fixtures::random_step_distribution(rng);
  const auto g = fixtures::random_step_distribution(rng);
  bool quantiles_below = true;
  for (int j = 1; j < 1000; ++j) quantiles_below = quantiles_below && quantile_at(f, j / 1000.0) <= quantile_at(g, j / 1000.0);
  const Relation r = stochastic_order(f, g);
  EXPECT_EQ(r == Relation::Leq || r == Relation::Equal, quantiles_below);
}

TEST_P(OrderProperty, PosetRoundTripsThroughMatrix) {
  std::mt19937_64 rng(GetParam() + 2000);
  const auto m = fixtures::random_partial_order(rng, 12);
  const auto p = detail::poset_from_matrix(m);
  EXPECT_EQ(detail::to_matrix(p), m);
}

INSTANTIATE_TEST_SUITE_P(Random, OrderProperty, ::testing::Range(1, 31));

}  // namespace
}  // namespace crpsdecomp
