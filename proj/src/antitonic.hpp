#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "crpsdecomp/step_distribution.hpp"
#include "poset.hpp"

namespace crpsdecomp::detail {

// Weighted least-squares nondecreasing fit of a sequence.
void pav_increasing(std::span<const double> values, std::span<const double> weights, std::span<double> fit);

// 1-based rank of the lower empirical alpha-quantile among k sorted values.
std::size_t lower_quantile_rank(double alpha, std::size_t k);

// Weighted least squares over the groups of a poset subject to
// theta_h >= theta_g whenever h lies below g.
class AntitonicSolver {
 public:
  explicit AntitonicSolver(const Poset& poset);
  ~AntitonicSolver();

  void solve(std::span<const double> values, std::span<const double> weights, std::span<double> fit);

  // Same result as solve(), reusing the previous solve or update whose
  // values differ from these only at the `changed` nodes (same weights).
  void update(std::span<const double> values, std::span<const double> weights, std::span<double> fit,
              std::span<const std::size_t> changed);

 private:
  void solve_block(std::vector<std::size_t> block, std::span<const double> values, std::span<const double> weights,
                   std::span<double> fit);
  // Fills depth[k] with the number of block members below block[k]; true when
  // these are 0, ..., size - 1 in some order, i.e. the block is a chain.
  bool chain_depths(const std::vector<std::size_t>& block, std::vector<std::size_t>& depth) const;
  void solve_chain(const std::vector<std::size_t>& block, const std::vector<std::size_t>& depth,
                   std::span<const double> values, std::span<const double> weights, std::span<double> fit);
  void reset_blocks();
  // Records a final block: its members share one fitted value certified
  // optimal by the constraints inside it.
  void emit(std::vector<std::size_t> members);

  struct FlowBuffers;
  // Blocks larger than this skip the chain test, which costs a pass over
  // the order bitsets of every member.
  static constexpr std::size_t chain_check_limit = 64;

  const Poset& poset_;
  std::vector<std::size_t> topo_;  // a linear extension, bottom first
  std::vector<std::size_t> local_;
  std::vector<std::size_t> stamp_;
  std::size_t stamp_counter_ = 0;
  std::vector<char> fixed_hi_, fixed_lo_, seen_;
  std::unique_ptr<FlowBuffers> flow_;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_of_, free_ids_;
  std::vector<std::size_t> region_mark_, seen_mark_;
  std::size_t region_counter_ = 0;
};

// Visits every unique outcome threshold z_k in increasing order with the
// per-group IDR values at z_k and the per-group counts of outcomes <= z_k.
using IdrVisitor =
    std::function<void(std::size_t k, double z, std::span<const double> fit, std::span<const double> ones)>;

std::vector<double> unique_outcomes(const CaseCollection& cases);

void idr_sweep(const CaseCollection& cases, const Poset& poset, const IdrVisitor& visit);

}  // namespace crpsdecomp::detail
