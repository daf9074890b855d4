#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparsejt/decomposition.hpp"
#include "sparsejt/model.hpp"

namespace sjt {

/// A hyperedge offered to a bag's cover LP. Only the part of `scope` inside
/// the bag matters. The size |phi_e| (possibly an estimate) is kept as log2 so
/// huge message sizes do not overflow; an empty edge has log2_size = -inf.
struct CoverEdge {
  std::vector<VarId> scope;
  double log2_size = 0.0;

  static CoverEdge sized(std::vector<VarId> scope, double size);
  double size() const;
};

struct CoverSolution {
  std::size_t bag = 0;
  std::vector<VarId> bag_vars;
  std::vector<CoverEdge> edges;
  std::vector<double> weights;  // x_e per edge, clamped to [0, 1]
  double log2_bound = 0.0;      // sum x_e log2 |phi_e|; -inf if an edge is empty
  double cover_number = 0.0;    // sum x_e

  double log10_bound() const;
  /// Largest shortfall of sum_{e ∋ v} x_e below 1 (0 when feasible).
  double max_violation() const;
};

/// Solves min sum x_e log2|phi_e| s.t. sum_{e ∋ v} x_e >= 1 for v in the bag,
/// x >= 0. Edges not touching the bag get weight 0. Throws InfeasibleCover if
/// some bag variable lies in no edge.
CoverSolution solve_fractional_cover(std::span<const VarId> bag_vars, std::vector<CoverEdge> edges);

/// Same LP with every log-size set to 1: the fractional edge cover number.
CoverSolution solve_unit_cover(std::span<const VarId> bag_vars, std::vector<CoverEdge> edges);

/// Edges of bag `v`: every factor whose scope meets chi(v), restricted to chi(v).
std::vector<CoverEdge> bag_factor_edges(const Ghd& ghd, const Model& model, std::size_t v);

/// max over bags of the fractional edge cover number.
double fhtw(const Ghd& ghd, const Model& model);

/// log10 (N^fhtw / D^tw).
double log10_rd(double max_factor_size, double fhtw, double max_domain, double tw);

struct Predictors {
  double log10_rj = 0.0;
  double log10_rd = 0.0;
  double fhtw = 0.0;
  std::size_t tw = 0;
  double log10_rho = 0.0;
  std::size_t max_factor_size = 0;  // N
  std::uint32_t max_domain = 0;     // D
  std::vector<CoverSolution> bag_covers;  // the covers behind R_J, one per bag
};

/// R_J uses, per bag, every factor meeting the bag plus the children's
/// messages with sizes estimated bottom-up as min(separator truth table,
/// child's bound). R_D uses N = max factor size and D = max domain size.
Predictors predictors(const Ghd& ghd, const Model& model);

}  // namespace sjt
