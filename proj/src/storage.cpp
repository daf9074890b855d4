#include "sparsejt/storage.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sparsejt/errors.hpp"

namespace sjt {

std::vector<std::uint64_t> index_strides(std::span<const std::uint32_t> radices, IndexDirection direction) {
  const std::size_t n = radices.size();
  std::vector<std::uint64_t> strides(n);
  std::uint64_t place = 1;
  for (std::size_t j = 0; j < n; ++j) {
    // Least significant position first.
    const std::size_t i = direction == IndexDirection::Forward ? n - 1 - j : j;
    strides[i] = place;
    if (radices[i] == 0) throw InvalidArgument("index: zero radix");
    if (place > UINT64_MAX / radices[i])
      throw IndexOverflow("index: truth table of " + std::to_string(n) + " variables exceeds 64 bits");
    place *= radices[i];
  }
  return strides;
}

std::uint64_t encode_index(std::span<const Value> tuple, std::span<const std::uint32_t> radices,
                           IndexDirection direction) {
  if (tuple.size() != radices.size()) throw InvalidArgument("encode_index: tuple/radix length mismatch");
  const auto strides = index_strides(radices, direction);
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (tuple[i] >= radices[i]) throw InvalidArgument("encode_index: component out of range");
    index += tuple[i] * strides[i];
  }
  return index;
}

std::vector<Value> decode_index(std::uint64_t index, std::span<const std::uint32_t> radices,
                                IndexDirection direction) {
  const std::size_t n = radices.size();
  std::vector<Value> tuple(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = direction == IndexDirection::Forward ? n - 1 - j : j;
    if (radices[i] == 0) throw InvalidArgument("decode_index: zero radix");
    tuple[i] = static_cast<Value>(index % radices[i]);
    index /= radices[i];
  }
  if (index != 0) throw InvalidArgument("decode_index: index out of range");
  return tuple;
}

LevelOrderTrie LevelOrderTrie::from_sorted_rows(std::vector<VarId> var_order, std::span<const Value> tuples,
                                                std::span<const double> probs) {
  LevelOrderTrie trie;
  const std::size_t depth = var_order.size();
  trie.var_order_ = std::move(var_order);
  trie.levels_.resize(depth);
  trie.leaf_probs_.assign(probs.begin(), probs.end());
  if (depth == 0) return trie;
  for (auto& lv : trie.levels_) lv.values.reserve(probs.size());

  const Value* prev = nullptr;
  for (std::size_t r = 0; r < probs.size(); ++r) {
    const Value* row = tuples.data() + r * depth;
    std::size_t d = 0;
    if (prev != nullptr)
      while (d < depth && row[d] == prev[d]) ++d;
    if (prev != nullptr && d == depth) throw InvalidArgument("trie: duplicate tuple");
    if (prev != nullptr && row[d] < prev[d]) throw InvalidArgument("trie: rows not sorted");
    for (std::size_t k = d; k < depth; ++k) {
      auto& lv = trie.levels_[k];
      lv.values.push_back(row[k]);
      if (k + 1 < depth) lv.child_begin.push_back(static_cast<std::uint32_t>(trie.levels_[k + 1].values.size()));
    }
    prev = row;
  }
  for (std::size_t k = 0; k + 1 < depth; ++k)
    trie.levels_[k].child_begin.push_back(static_cast<std::uint32_t>(trie.levels_[k + 1].values.size()));
  return trie;
}

std::vector<std::vector<Value>> LevelOrderTrie::enumerate() const {
  std::vector<std::vector<Value>> out;
  const std::size_t d = depth();
  if (d == 0) return out;
  std::vector<Value> path(d);
  // Depth-first walk keeping, per level, the cell index.
  auto walk = [&](auto&& self, std::size_t k, std::uint32_t begin, std::uint32_t end) -> void {
    for (std::uint32_t c = begin; c < end; ++c) {
      path[k] = levels_[k].values[c];
      if (k + 1 == d)
        out.push_back(path);
      else
        self(self, k + 1, levels_[k].child_begin[c], levels_[k].child_begin[c + 1]);
    }
  };
  walk(walk, 0, 0, static_cast<std::uint32_t>(levels_[0].values.size()));
  return out;
}

LevelOrderTrie build_trie(const FactorTable& factor, std::span<const VarId> var_order) {
  const std::size_t arity = factor.arity();
  if (var_order.size() != arity) throw InvalidArgument("build_trie: var_order is not a permutation of the scope");
  std::vector<std::size_t> col(arity);
  bool identity = true;
  for (std::size_t k = 0; k < arity; ++k) {
    const auto pos = factor.position(var_order[k]);
    if (!pos) throw InvalidArgument("build_trie: var_order is not a permutation of the scope");
    col[k] = *pos;
    identity = identity && col[k] == k;
  }
  std::vector<VarId> order(var_order.begin(), var_order.end());
  if (identity)
    return LevelOrderTrie::from_sorted_rows(std::move(order), factor.flat_tuples(), factor.probs());

  const std::size_t n = factor.size();
  std::vector<Value> permuted(n * arity);
  for (std::size_t r = 0; r < n; ++r) {
    const auto t = factor.tuple(r);
    for (std::size_t k = 0; k < arity; ++k) permuted[r * arity + k] = t[col[k]];
  }
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  std::sort(rows.begin(), rows.end(), [&](std::uint32_t a, std::uint32_t b) {
    const Value* ra = permuted.data() + a * arity;
    const Value* rb = permuted.data() + b * arity;
    return std::lexicographical_compare(ra, ra + arity, rb, rb + arity);
  });
  std::vector<Value> sorted(n * arity);
  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(permuted.data() + rows[i] * arity, arity, sorted.data() + i * arity);
    probs[i] = factor.prob(rows[i]);
  }
  return LevelOrderTrie::from_sorted_rows(std::move(order), sorted, probs);
}

std::size_t IndexedList::locate_reverse(std::uint64_t index) const {
  auto it = std::lower_bound(reverse_.begin(), reverse_.end(), index);
  if (it == reverse_.end() || *it != index) return reverse_.size();
  return static_cast<std::size_t>(it - reverse_.begin());
}

std::vector<Value> IndexedList::tuple(std::size_t i) const {
  return decode_index(reverse_[i], radices_, IndexDirection::Reverse);
}

IndexedList build_index_list(const FactorTable& factor, IndexKind kind) {
  IndexedList list;
  list.kind_ = kind;
  list.var_order_ = factor.scope();
  list.radices_ = factor.cards();
  const auto rev = index_strides(list.radices_, IndexDirection::Reverse);
  const auto fwd = index_strides(list.radices_, IndexDirection::Forward);
  const std::size_t n = factor.size();
  const std::size_t arity = factor.arity();
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto t = factor.tuple(r);
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < arity; ++i) idx += t[i] * rev[i];
    keyed[r] = {idx, static_cast<std::uint32_t>(r)};
  }
  std::sort(keyed.begin(), keyed.end());
  list.reverse_.reserve(n);
  list.probs_.reserve(n);
  for (const auto& [idx, r] : keyed) {
    list.reverse_.push_back(idx);
    list.probs_.push_back(factor.prob(r));
    if (kind == IndexKind::ForwardAndReverse) {
      const auto t = factor.tuple(r);
      std::uint64_t f = 0;
      for (std::size_t i = 0; i < arity; ++i) f += t[i] * fwd[i];
      list.forward_.push_back(f);
    }
  }
  return list;
}

FactorTable to_factor(const IndexedList& list) {
  std::vector<Value> tuples;
  tuples.reserve(list.size() * list.var_order().size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto t = list.tuple(i);
    tuples.insert(tuples.end(), t.begin(), t.end());
  }
  return FactorTable(list.var_order(), list.radices(), std::move(tuples),
                     std::vector<double>(list.probs().begin(), list.probs().end()));
}

LevelOrderTrie build_trie(const IndexedList& list) {
  const std::size_t arity = list.var_order().size();
  std::vector<VarId> order(list.var_order().rbegin(), list.var_order().rend());
  std::vector<std::uint32_t> radices(list.radices().rbegin(), list.radices().rend());
  std::vector<Value> rows;
  rows.reserve(list.size() * arity);
  for (std::size_t i = 0; i < list.size(); ++i) {
    // Reverse index of var_order == forward index of the reversed order.
    const auto t = decode_index(list.reverse_index()[i], radices, IndexDirection::Forward);
    rows.insert(rows.end(), t.begin(), t.end());
  }
  return LevelOrderTrie::from_sorted_rows(std::move(order), rows, list.probs());
}

}  // namespace sjt
