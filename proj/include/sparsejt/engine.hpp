#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sparsejt/cover.hpp"
#include "sparsejt/decomposition.hpp"
#include "sparsejt/hybrid.hpp"
#include "sparsejt/marginals.hpp"
#include "sparsejt/model.hpp"
#include "sparsejt/propagation.hpp"

namespace sjt {

struct InferenceOptions {
  Mode mode = Mode::Multiway;
  double hybrid_beta = 1.0;
  double hybrid_sigma = 0.9;
  std::uint64_t memory_cap = kDefaultMemoryCap;
  std::optional<double> timeout_seconds;
  bool run_both_kernels = false;
  std::optional<std::size_t> root;  // bag to root the tree at instead of the default
};

struct InferenceResult {
  MarginalSet marginals;          // over the original variables and factors
  ConditionedModel conditioned;   // evidence sliced out
  Model working;                  // conditioned model plus unit factors for variables in no factor
  std::vector<VarId> order;       // elimination order on `working`
  Ghd ghd;
  StrategyMap strategies;
  std::vector<BagState> states;
  Predictors predictors;
  double calibration_error = 0.0;
};

/// Evidence slicing, min-fill decomposition, strategy assignment, both
/// passes and marginal extraction. Throws InconsistentEvidence, Timeout,
/// ResourceLimit and whatever the input validation raises.
InferenceResult infer(const Model& model, const InferenceOptions& options = {});

/// Diagnostics block: decomposition widths and predictors, the strategy map,
/// seed decisions and per-bag work.
std::string format_stats(const InferenceResult& result);

/// Largest relative excess of a bag's product size over its AGM bound
/// (0 when every bag complies) and largest LP constraint shortfall.
struct BoundCheck {
  double worst_excess = 0.0;
  double worst_violation = 0.0;
  std::size_t bags_over = 0;
};
BoundCheck check_bounds(const std::vector<BagState>& states);

}  // namespace sjt
