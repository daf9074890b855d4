#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sparsejt/model.hpp"

namespace sjt {

/// One bag of a generalized hypertree decomposition.
struct GhdNode {
  std::vector<VarId> chi;            // bag variables, ascending
  std::vector<std::size_t> lambda;   // factors whose scope lies inside chi
  std::vector<std::size_t> alpha;    // factors assigned to this bag (subset of lambda)
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
};

/// Rooted tree of bags. Every factor is assigned to exactly one bag.
struct Ghd {
  std::vector<GhdNode> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // undirected tree edges
  std::size_t root = 0;

  std::size_t size() const { return nodes.size(); }
  /// max |chi(v)| (bag size, not bag size - 1).
  std::size_t treewidth() const;
  /// chi(v) ∩ chi(parent(v)); empty for the root.
  std::vector<VarId> separator(std::size_t v) const;
  /// Bags ordered by decreasing depth, ties by id: children always precede parents.
  std::vector<std::size_t> leaves_to_root() const;
  std::vector<std::size_t> depths() const;
  /// Bag plus all its descendants.
  std::vector<std::size_t> subtree(std::size_t v) const;
};

/// Ordering key for a truth-table size: exact when it fits in 64 bits.
struct TableSize {
  std::optional<std::uint64_t> exact;
  double log10 = 0.0;

  static TableSize of(std::span<const std::uint32_t> cards);
  static TableSize of_vars(std::span<const VarId> vars, std::span<const std::uint32_t> domains);
  friend bool operator<(const TableSize& a, const TableSize& b);
  friend bool operator==(const TableSize& a, const TableSize& b);
};

/// Greedy min-fill over the primal graph; ties go to the smallest variable id.
std::vector<VarId> min_fill_order(const Model& model);

/// Number of fill edges that eliminating along `order` adds.
std::size_t count_fill_edges(const Model& model, std::span<const VarId> order);

/// Clique tree from an elimination ordering: maximal elimination cliques as
/// bags, max-weight spanning tree on separator sizes (components joined by
/// empty-separator edges), rooted at the bag with the largest truth table.
Ghd build_ghd(const Model& model, std::span<const VarId> order);

/// Same tree, rooted at `root`.
Ghd reroot(const Ghd& ghd, std::size_t root);

/// Coverage (every factor scope inside some bag that lists it) and running
/// intersection (bags holding a variable form a connected subtree).
bool has_coverage(const Ghd& ghd, const Model& model);
bool has_running_intersection(const Ghd& ghd, std::size_t num_variables);
/// Each factor in exactly one alpha, alpha ⊆ lambda, scope ⊆ chi.
bool has_unique_assignment(const Ghd& ghd, const Model& model);

/// rho = sum over bags of prod |D(U)|.
struct Rho {
  std::optional<unsigned __int128> exact;
  double log10 = 0.0;
  double value() const;
};
Rho rho(const Ghd& ghd, std::span<const std::uint32_t> domains);

}  // namespace sjt
