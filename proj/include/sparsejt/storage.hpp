#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparsejt/model.hpp"

namespace sjt {

/// Which end of the variable order is most significant in a mixed-radix index.
/// Forward: the first variable. Reverse: the last variable.
enum class IndexDirection { Forward, Reverse };

std::uint64_t encode_index(std::span<const Value> tuple, std::span<const std::uint32_t> radices,
                           IndexDirection direction);
std::vector<Value> decode_index(std::uint64_t index, std::span<const std::uint32_t> radices,
                                IndexDirection direction);

/// Place values of a mixed-radix encoding: index = sum(tuple[i] * stride[i]).
/// Throws IndexOverflow when prod(radices) does not fit into 64 bits.
std::vector<std::uint64_t> index_strides(std::span<const std::uint32_t> radices, IndexDirection direction);

/// Flattened trie: one contiguous array of cells per level. Cell i of level k
/// owns the children [child_begin[i], child_begin[i+1]) of level k+1. The
/// first level forms a single block. Leaf probabilities align with the cells
/// of the last level, so each root-to-leaf path is one stored tuple.
class LevelOrderTrie {
 public:
  struct Level {
    std::vector<Value> values;
    std::vector<std::uint32_t> child_begin;  // size values.size()+1; empty on the last level
  };

  LevelOrderTrie() = default;

  const std::vector<VarId>& var_order() const { return var_order_; }
  std::size_t depth() const { return levels_.size(); }
  const Level& level(std::size_t k) const { return levels_[k]; }
  std::span<const double> leaf_probs() const { return leaf_probs_; }
  std::size_t num_leaves() const { return leaf_probs_.size(); }

  /// Values of the children block of `cell` on level `k` (k+1 < depth()).
  std::span<const Value> children(std::size_t k, std::uint32_t cell) const {
    const auto& lv = levels_[k];
    const auto b = lv.child_begin[cell];
    const auto e = lv.child_begin[cell + 1];
    return {levels_[k + 1].values.data() + b, e - b};
  }
  std::uint32_t child_offset(std::size_t k, std::uint32_t cell) const { return levels_[k].child_begin[cell]; }

  /// Tuples in trie order (components in var_order), mostly for tests.
  std::vector<std::vector<Value>> enumerate() const;

  /// Builds from rows already sorted lexicographically by var_order (`tuples`
  /// components in var_order). Single pass.
  static LevelOrderTrie from_sorted_rows(std::vector<VarId> var_order, std::span<const Value> tuples,
                                         std::span<const double> probs);

 private:
  std::vector<VarId> var_order_;
  std::vector<Level> levels_;
  std::vector<double> leaf_probs_;
};

/// Trie over `factor` with levels ordered by `var_order` (a permutation of
/// the scope).
LevelOrderTrie build_trie(const FactorTable& factor, std::span<const VarId> var_order);

enum class IndexKind { ReverseOnly, ForwardAndReverse };

/// Sorted list of <reverse index, probability> pairs with an optional aligned
/// forward index. var_order is the factor's scope order.
class IndexedList {
 public:
  IndexKind kind() const { return kind_; }
  const std::vector<VarId>& var_order() const { return var_order_; }
  const std::vector<std::uint32_t>& radices() const { return radices_; }
  std::size_t size() const { return reverse_.size(); }
  std::span<const std::uint64_t> reverse_index() const { return reverse_; }
  std::span<const std::uint64_t> forward_index() const { return forward_; }
  std::span<const double> probs() const { return probs_; }

  /// Position of the entry with the given reverse index, or size() if absent.
  std::size_t locate_reverse(std::uint64_t index) const;

  std::vector<Value> tuple(std::size_t i) const;

  friend IndexedList build_index_list(const FactorTable& factor, IndexKind kind);

 private:
  IndexKind kind_ = IndexKind::ReverseOnly;
  std::vector<VarId> var_order_;
  std::vector<std::uint32_t> radices_;
  std::vector<std::uint64_t> reverse_;
  std::vector<std::uint64_t> forward_;
  std::vector<double> probs_;
};

/// Throws IndexOverflow if the scope's truth table needs more than 64 bits.
IndexedList build_index_list(const FactorTable& factor, IndexKind kind);

/// The factor back from its list form.
FactorTable to_factor(const IndexedList& list);

/// Single-pass trie over reverse(list.var_order()): the reverse-sorted list is
/// already in lexicographic order for that level order.
LevelOrderTrie build_trie(const IndexedList& list);

}  // namespace sjt
