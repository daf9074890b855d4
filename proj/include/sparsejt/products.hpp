#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sparsejt/deadline.hpp"
#include "sparsejt/model.hpp"

namespace sjt {

/// Per-bag product strategy.
enum class Strategy : std::uint8_t {
  Multiway = 0,           // worst-case optimal join, bag factors and messages only
  MultiwayProjected = 1,  // same, plus 0/1-projections of outside factors
  Pairwise = 2,           // dense truth-table products
};

std::string_view to_string(Strategy s);

inline constexpr std::uint64_t kDefaultMemoryCap = std::uint64_t{1} << 31;

struct KernelLimits {
  std::uint64_t memory_cap = kDefaultMemoryCap;  // max dense table entries
  const Deadline* deadline = nullptr;
};

/// One factor product: join `inputs` over `bag_vars` (in that order) and sum
/// the result onto `marginal_vars`.
struct ProductTask {
  std::vector<VarId> bag_vars;
  std::vector<std::uint32_t> bag_cards;  // aligned with bag_vars
  std::vector<const FactorTable*> inputs;
  std::vector<VarId> marginal_vars;
  Strategy strategy = Strategy::Multiway;
};

struct KernelCounters {
  std::uint64_t visited = 0;      // candidate values drawn by the multiway join
  std::uint64_t dense_cells = 0;  // truth-table cells written by the pairwise kernel
};

struct ProductResult {
  FactorTable product;  // over bag_vars
  FactorTable message;  // over marginal_vars
  KernelCounters counters;
};

/// Variable-at-a-time multiway intersection over flattened tries. At each bag
/// variable the candidate values come from the smallest participating child
/// block and are probed in the others (galloping when sizes are skewed). The
/// message is accumulated in the same pass; when marginal_vars is a prefix of
/// bag_vars this is a prefix aggregation.
ProductResult mult_fac_prod(const ProductTask& task, const KernelLimits& limits = {});

/// Dense baseline: a running truth table over the union of scopes seen so far,
/// multiplying inputs in ascending scope-size order by index arithmetic.
/// Throws ResourceLimit if the bag's truth table exceeds limits.memory_cap.
ProductResult pairwise_prod(const ProductTask& task, const KernelLimits& limits = {});

/// Dispatches on task.strategy (both multiway strategies use mult_fac_prod).
ProductResult run_product(const ProductTask& task, const KernelLimits& limits = {});

/// Support of `factor` projected onto scope ∩ bag_vars, every probability 1.
FactorTable zero_one_projection(const FactorTable& factor, std::span<const VarId> bag_vars);

/// Sums out every variable not in `keep`.
FactorTable marginalize(const FactorTable& factor, std::span<const VarId> keep);

}  // namespace sjt
