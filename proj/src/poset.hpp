#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "crpsdecomp/order.hpp"

namespace crpsdecomp::detail {

using Bits = boost::dynamic_bitset<std::uint64_t>;

// Stochastic order among the distinct forecasts of a collection. Cases with
// identical forecasts share a group; order sets are strict and over groups.
struct Poset {
  std::vector<std::size_t> group_of;
  std::vector<std::vector<std::size_t>> members;
  std::vector<Bits> down;  // h in down[g]  <=>  F_h strictly below F_g
  std::vector<Bits> up;
  std::vector<std::vector<std::size_t>> lower_covers;
  std::vector<std::vector<std::size_t>> upper_covers;
  bool is_chain = false;
  std::vector<std::size_t> chain;  // ascending, only when is_chain

  std::size_t groups() const { return members.size(); }
  std::size_t cases() const { return group_of.size(); }
};

Poset poset_from_cases(const CaseCollection& cases);

// Throws std::invalid_argument if the matrix breaks an invariant.
Poset poset_from_matrix(const OrderRelationMatrix& m);

OrderRelationMatrix to_matrix(const Poset& p);

}  // namespace crpsdecomp::detail
