#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "sparsejt/decomposition.hpp"
#include "sparsejt/model.hpp"
#include "sparsejt/products.hpp"

namespace sjt {

enum class Mode { Multiway, Multiway01, Pairwise, Hybrid };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view text);

struct HybridConfig {
  double beta = 1.0;   // pairwise if truth table <= beta * AGM bound
  double sigma = 0.9;  // projections if some projected support fraction < sigma
  std::uint64_t memory_cap = kDefaultMemoryCap;
};

/// How a seed bag (one with assigned factors) was decided.
struct SeedDecision {
  std::size_t bag = 0;
  Strategy decision = Strategy::Multiway;
  Strategy fallback = Strategy::Multiway;  // used where pairwise would exceed the cap
  double log10_truth_table = 0.0;
  double log10_agm = 0.0;
  double min_projection_fraction = 1.0;
};

struct StrategyMap {
  static constexpr std::size_t kDefaultRegion = std::numeric_limits<std::size_t>::max();

  std::vector<Strategy> assignment;  // per bag
  std::vector<std::size_t> region;   // seed bag whose decision reached the bag, or kDefaultRegion
  std::vector<SeedDecision> seeds;   // in visit order

  Strategy at(std::size_t bag) const { return assignment.at(bag); }
  static StrategyMap constant(std::size_t bags, Strategy s);
};

/// Fixed modes give a constant map. Hybrid visits bags with assigned factors
/// by decreasing truth-table size (ties by id), decides each from its own
/// factors only, and pushes the decision down its subtree until it meets a
/// bag that is already decided. Bags left over take the first seed's
/// decision. No bag whose truth table exceeds the cap is set to pairwise.
StrategyMap assign_strategies(const Ghd& ghd, const Model& model, Mode mode, const HybridConfig& config = {});

}  // namespace sjt
