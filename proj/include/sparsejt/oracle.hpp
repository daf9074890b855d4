#pragma once

#include <cstdint>
#include <random>

#include "sparsejt/marginals.hpp"
#include "sparsejt/model.hpp"

namespace sjt {

inline constexpr double kBruteForceLimit = 1e7;  // max joint assignments the oracle enumerates

/// Enumerates every full assignment consistent with the evidence. Absent
/// listing entries count as 0. Evidence variables get a point mass. Throws
/// ResourceLimit past kBruteForceLimit and InconsistentEvidence when Z = 0.
MarginalSet brute_force_marginals(const Model& model);

/// Keeps ceil(keep_fraction * N) entries of every factor, chosen uniformly
/// without replacement from one mt19937_64 stream seeded with `seed`, in
/// factor order. The kept rows stay in their original order. At least one
/// entry always survives.
Model induce_sparsity(const Model& model, double keep_fraction, std::uint64_t seed);

/// Uniform integer in [0, bound) by rejection, so streams are reproducible
/// across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

struct ComparisonReport {
  double max_abs_error = 0.0;
  VarId worst_variable = 0;
  bool passed = true;
};

/// Max absolute entry difference over the variable marginals. Throws
/// InvalidArgument when the variable sets or domains differ.
ComparisonReport compare_marginals(const MarginalSet& a, const MarginalSet& b, double tolerance = 1e-5);

}  // namespace sjt
