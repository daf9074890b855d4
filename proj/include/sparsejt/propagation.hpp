#pragma once

#include <optional>
#include <vector>

#include "sparsejt/cover.hpp"
#include "sparsejt/decomposition.hpp"
#include "sparsejt/hybrid.hpp"
#include "sparsejt/marginals.hpp"
#include "sparsejt/model.hpp"
#include "sparsejt/products.hpp"
#include "sparsejt/storage.hpp"

namespace sjt {

/// What the up pass did at one bag.
struct BagRun {
  Strategy strategy = Strategy::Multiway;
  std::size_t factor_inputs = 0;   // assigned factors
  std::size_t message_inputs = 0;  // children's up-messages
  std::size_t projections = 0;     // 0/1-projections of outside factors
  std::size_t unit_inputs = 0;     // all-ones factors for otherwise uncovered variables
  CoverSolution cover;             // LP over the inputs actually joined, with their real sizes
  std::size_t product_size = 0;
  std::size_t message_size = 0;
  KernelCounters counters;
  // Filled when both kernels are run: the other kernel's counters and
  // whether its product and message matched.
  std::optional<KernelCounters> other_counters;
  std::optional<bool> kernels_agree;
  double seconds = 0.0;
};

struct BagState {
  FactorTable product;                 // phi'_v; calibrated after the down pass
  FactorTable up_message;              // over the separator with the parent; scalar at the root
  std::optional<IndexedList> up_index; // forward+reverse index of up_message, absent if over 64 bits
  std::vector<double> down_message;    // aligned with up_index when present, else with up_message rows
  double log_scale = 0.0;              // natural log of the factor divided out of product and message
  BagRun run;
};

struct PropagationOptions {
  KernelLimits limits;
  bool run_both_kernels = false;
};

/// Leaves-to-root pass. Each bag joins its assigned factors, its children's
/// messages and, under strategy 1, 0/1-projections of the factors that meet
/// it from outside; variables still uncovered get an all-ones factor.
/// ResourceLimit from a kernel is rethrown naming the bag.
std::vector<BagState> join_infer_up(const Ghd& ghd, const Model& model, const StrategyMap& strategies,
                                    const PropagationOptions& options = {});

/// Root-to-leaves calibration: each child's product is multiplied in place by
/// down/up on its separator (0/0 = 0). Rows that drop to zero are removed.
void join_infer_down(const Ghd& ghd, std::vector<BagState>& states, const PropagationOptions& options = {});

/// Natural log of Z from the root product, the per-bag scales and the
/// model's folded constant. Throws InconsistentEvidence when Z = 0.
double log_partition(const Ghd& ghd, const Model& model, const std::vector<BagState>& states);

/// Variable marginals from the smallest bag holding each variable, factor
/// marginals from the factor's assigned bag, each normalized by the bag's mass.
MarginalSet extract_marginals(const Ghd& ghd, const Model& model, const std::vector<BagState>& states);

/// Largest entry-wise relative disagreement between neighbouring bags'
/// products summed onto their separator.
double calibration_error(const Ghd& ghd, const std::vector<BagState>& states);

}  // namespace sjt
