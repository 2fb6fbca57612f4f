#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "crpsdecomp/step_distribution.hpp"

namespace crpsdecomp {

// LEQ at (i, j) means F_i is stochastically smaller than or equal to F_j,
// i.e. F_i(x) >= F_j(x) for all x, with strict inequality somewhere.
enum class Relation : std::uint8_t { Equal, Leq, Geq, Incomparable };

std::string_view to_string(Relation r);
Relation mirror(Relation r);

Relation stochastic_order(const StepDistribution& f, const StepDistribution& g);

class OrderRelationMatrix {
 public:
  // Diagonal Equal, everything else Incomparable.
  explicit OrderRelationMatrix(std::size_t n);

  std::size_t size() const { return n_; }
  Relation operator()(std::size_t i, std::size_t j) const { return rel_[i * n_ + j]; }

  // Sets (i, j) and the mirrored (j, i).
  void set(std::size_t i, std::size_t j, Relation r);

  // Throws std::invalid_argument naming the first broken invariant
  // (diagonal, mirror symmetry, Equal classes, transitivity).
  void validate() const;

  friend bool operator==(const OrderRelationMatrix&, const OrderRelationMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<Relation> rel_;
};

OrderRelationMatrix order_matrix(const CaseCollection& cases);

}  // namespace crpsdecomp
