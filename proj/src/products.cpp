#include "sparsejt/products.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "sparsejt/errors.hpp"
#include "sparsejt/storage.hpp"

namespace sjt {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Multiway:
      return "multiway";
    case Strategy::MultiwayProjected:
      return "multiway01";
    case Strategy::Pairwise:
      return "pairwise";
  }
  return "?";
}

namespace {

void check_task(const ProductTask& task) {
  if (task.bag_cards.size() != task.bag_vars.size()) throw InvalidArgument("product: bag cards misaligned");
  std::vector<bool> covered(task.bag_vars.size(), false);
  for (const auto* f : task.inputs) {
    for (auto v : f->scope()) {
      auto it = std::find(task.bag_vars.begin(), task.bag_vars.end(), v);
      if (it == task.bag_vars.end())
        throw InvalidArgument("product: input variable " + std::to_string(v) + " outside the bag");
      covered[static_cast<std::size_t>(it - task.bag_vars.begin())] = true;
    }
  }
  for (std::size_t k = 0; k < covered.size(); ++k)
    if (!covered[k]) throw InvalidArgument("product: bag variable " + std::to_string(task.bag_vars[k]) + " not covered");
  for (auto v : task.marginal_vars)
    if (std::find(task.bag_vars.begin(), task.bag_vars.end(), v) == task.bag_vars.end())
      throw InvalidArgument("product: marginal variable outside the bag");
}

// Collects message mass either as a prefix aggregation or through a map.
class MessageSink {
 public:
  explicit MessageSink(const ProductTask& task) : task_(task) {
    const std::size_t f = task.marginal_vars.size();
    std::vector<VarId> a(task.marginal_vars), b(task.bag_vars.begin(), task.bag_vars.begin() + static_cast<std::ptrdiff_t>(std::min(f, task.bag_vars.size())));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    prefix_ = a == b;
    for (auto v : task.marginal_vars)
      pos_.push_back(static_cast<std::size_t>(std::find(task.bag_vars.begin(), task.bag_vars.end(), v) - task.bag_vars.begin()));
  }

  bool prefix() const { return prefix_; }
  std::size_t prefix_len() const { return task_.marginal_vars.size(); }

  void emit_prefix(const std::vector<Value>& assignment, double mass) {
    if (mass <= 0.0) return;
    rows_.insert(rows_.end(), assignment.begin(), assignment.begin() + static_cast<std::ptrdiff_t>(prefix_len()));
    probs_.push_back(mass);
  }

  void add(const std::vector<Value>& assignment, double p) {
    std::vector<Value> key(pos_.size());
    for (std::size_t i = 0; i < pos_.size(); ++i) key[i] = assignment[pos_[i]];
    map_[std::move(key)] += p;
  }

  FactorTable finish() {
    std::vector<VarId> scope;
    std::vector<std::uint32_t> cards;
    if (prefix_) {
      for (std::size_t k = 0; k < prefix_len(); ++k) {
        scope.push_back(task_.bag_vars[k]);
        cards.push_back(task_.bag_cards[k]);
      }
    } else {
      for (auto p : pos_) {
        scope.push_back(task_.bag_vars[p]);
        cards.push_back(task_.bag_cards[p]);
      }
      for (const auto& [key, mass] : map_) {
        rows_.insert(rows_.end(), key.begin(), key.end());
        probs_.push_back(mass);
      }
    }
    return FactorTable(std::move(scope), std::move(cards), std::move(rows_), std::move(probs_));
  }

 private:
  const ProductTask& task_;
  bool prefix_ = false;
  std::vector<std::size_t> pos_;
  std::map<std::vector<Value>, double> map_;
  std::vector<Value> rows_;
  std::vector<double> probs_;
};

class MultiwayJoin {
 public:
  MultiwayJoin(const ProductTask& task, const KernelLimits& limits) : task_(task), limits_(limits), sink_(task) {
    const std::size_t k = task.bag_vars.size();
    at_level_.resize(k);
    tries_.reserve(task.inputs.size());
    for (std::size_t i = 0; i < task.inputs.size(); ++i) {
      const FactorTable& f = *task.inputs[i];
      empty_ = empty_ || f.empty();
      if (f.arity() == 0) {
        if (!f.empty()) scalar_ *= f.prob(0);
        tries_.emplace_back();
        block_.push_back({0, 0});
        continue;
      }
      std::vector<std::pair<std::size_t, VarId>> by_pos;
      for (auto v : f.scope())
        by_pos.emplace_back(static_cast<std::size_t>(std::find(task.bag_vars.begin(), task.bag_vars.end(), v) - task.bag_vars.begin()), v);
      std::sort(by_pos.begin(), by_pos.end());
      std::vector<VarId> order;
      for (std::size_t l = 0; l < by_pos.size(); ++l) {
        order.push_back(by_pos[l].second);
        at_level_[by_pos[l].first].push_back({i, l});
      }
      tries_.push_back(build_trie(f, order));
      const auto top = tries_.back().depth() > 0 ? tries_.back().level(0).values.size() : 0;
      block_.push_back({0, static_cast<std::uint32_t>(top)});
    }
    assignment_.assign(k, 0);
  }

  ProductResult run() {
    if (!empty_) search(0, scalar_);
    ProductResult out;
    out.product = FactorTable(task_.bag_vars, task_.bag_cards, std::move(rows_), std::move(probs_));
    out.message = sink_.finish();
    out.counters.visited = visited_;
    return out;
  }

 private:
  struct Participant {
    std::size_t input;
    std::size_t level;
  };
  struct Block {
    std::uint32_t begin;
    std::uint32_t end;
  };

  void search(std::size_t k, double p) {
    if (sink_.prefix() && k == sink_.prefix_len()) {
      const double saved = msg_mass_;
      msg_mass_ = 0.0;
      bind(k, p);
      sink_.emit_prefix(assignment_, msg_mass_);
      msg_mass_ = saved;
      return;
    }
    bind(k, p);
  }

  void bind(std::size_t k, double p) {
    if (k == task_.bag_vars.size()) {
      rows_.insert(rows_.end(), assignment_.begin(), assignment_.end());
      probs_.push_back(p);
      if (sink_.prefix())
        msg_mass_ += p;
      else
        sink_.add(assignment_, p);
      return;
    }
    const auto& parts = at_level_[k];
    std::size_t lead = 0;
    for (std::size_t j = 1; j < parts.size(); ++j)
      if (width(parts[j]) < width(parts[lead])) lead = j;

    const std::size_t np = parts.size();
    std::vector<std::uint32_t> cursor(np);
    for (std::size_t j = 0; j < np; ++j) cursor[j] = block_[parts[j].input].begin;
    std::vector<Block> saved(np);
    for (std::size_t j = 0; j < np; ++j) saved[j] = block_[parts[j].input];

    const auto& lead_vals = values(parts[lead]);
    const Block lb = saved[lead];
    for (std::uint32_t c = lb.begin; c < lb.end; ++c) {
      const Value x = lead_vals[c];
      if ((++visited_ & 0xFFFF) == 0 && limits_.deadline) limits_.deadline->check();
      bool match = true;
      bool exhausted = false;
      for (std::size_t j = 0; j < np && match; ++j) {
        if (j == lead) continue;
        const auto& vals = values(parts[j]);
        const bool skewed = width(saved[j]) >= 4 * width(lb);
        cursor[j] = seek(vals, cursor[j], saved[j].end, x, skewed);
        if (cursor[j] == saved[j].end) {
          exhausted = true;
          match = false;
        } else if (vals[cursor[j]] != x) {
          match = false;
        }
      }
      if (exhausted) break;
      if (!match) continue;
      cursor[lead] = c;

      double q = p;
      for (std::size_t j = 0; j < np; ++j) {
        const auto& part = parts[j];
        const auto& trie = tries_[part.input];
        if (part.level + 1 < trie.depth()) {
          const auto& lv = trie.level(part.level);
          block_[part.input] = {lv.child_begin[cursor[j]], lv.child_begin[cursor[j] + 1]};
        } else {
          q *= trie.leaf_probs()[cursor[j]];
        }
      }
      assignment_[k] = x;
      search(k + 1, q);
      for (std::size_t j = 0; j < np; ++j) block_[parts[j].input] = saved[j];
    }
  }

  // First position in [from, end) holding a value >= x.
  static std::uint32_t seek(const std::vector<Value>& vals, std::uint32_t from, std::uint32_t end, Value x, bool gallop) {
    if (!gallop) {
      while (from < end && vals[from] < x) ++from;
      return from;
    }
    std::uint32_t step = 1;
    std::uint32_t lo = from;
    std::uint32_t hi = from;
    while (hi < end && vals[hi] < x) {
      lo = hi + 1;
      hi = (end - hi > step) ? hi + step : end;
      step *= 2;
    }
    const std::uint32_t last = hi < end ? hi + 1 : end;
    auto it = std::lower_bound(vals.begin() + lo, vals.begin() + last, x);
    return static_cast<std::uint32_t>(it - vals.begin());
  }

  std::uint32_t width(const Participant& part) const { return width(block_[part.input]); }
  static std::uint32_t width(const Block& b) { return b.end - b.begin; }
  const std::vector<Value>& values(const Participant& part) const {
    return tries_[part.input].level(part.level).values;
  }

  const ProductTask& task_;
  const KernelLimits& limits_;
  MessageSink sink_;
  std::vector<LevelOrderTrie> tries_;
  std::vector<std::vector<Participant>> at_level_;
  std::vector<Block> block_;  // current block of each input at its next level
  std::vector<Value> assignment_;
  std::vector<Value> rows_;
  std::vector<double> probs_;
  double msg_mass_ = 0.0;
  double scalar_ = 1.0;  // product of arity-0 inputs
  bool empty_ = false;
  std::uint64_t visited_ = 0;
};

// Odometer over a mixed-radix space (last position fastest) that tracks
// linear offsets into several tables through per-position strides.
class Odometer {
 public:
  Odometer(std::vector<std::uint32_t> cards, std::vector<std::vector<std::uint64_t>> strides)
      : cards_(std::move(cards)), strides_(std::move(strides)), digit_(cards_.size(), 0), offset_(strides_.size(), 0) {}

  std::uint64_t offset(std::size_t table) const { return offset_[table]; }
  const std::vector<std::uint32_t>& digits() const { return digit_; }

  void next() {
    for (std::size_t k = cards_.size(); k-- > 0;) {
      ++digit_[k];
      for (std::size_t t = 0; t < offset_.size(); ++t) offset_[t] += strides_[t][k];
      if (digit_[k] < cards_[k]) return;
      for (std::size_t t = 0; t < offset_.size(); ++t) offset_[t] -= strides_[t][k] * cards_[k];
      digit_[k] = 0;
    }
  }

 private:
  std::vector<std::uint32_t> cards_;
  std::vector<std::vector<std::uint64_t>> strides_;
  std::vector<std::uint32_t> digit_;
  std::vector<std::uint64_t> offset_;
};

// Row-major strides of `sub` (ordered as in `space`) evaluated at the positions of `space`.
std::vector<std::uint64_t> embed_strides(const std::vector<VarId>& space, const std::vector<VarId>& sub,
                                         const std::vector<std::uint32_t>& sub_cards) {
  std::vector<std::uint64_t> stride(space.size(), 0);
  std::uint64_t place = 1;
  for (std::size_t i = sub.size(); i-- > 0;) {
    const auto pos = static_cast<std::size_t>(std::find(space.begin(), space.end(), sub[i]) - space.begin());
    stride[pos] = place;
    place *= sub_cards[i];
  }
  return stride;
}

}  // namespace

ProductResult mult_fac_prod(const ProductTask& task, const KernelLimits& limits) {
  check_task(task);
  MultiwayJoin join(task, limits);
  return join.run();
}

ProductResult pairwise_prod(const ProductTask& task, const KernelLimits& limits) {
  check_task(task);
  const auto bag_size = table_size_u64(task.bag_cards);
  if (!bag_size || *bag_size > limits.memory_cap)
    throw ResourceLimit("pairwise product: truth table of " + std::to_string(task.bag_vars.size()) +
                        " variables exceeds the memory cap of " + std::to_string(limits.memory_cap) + " entries");

  auto bag_pos = [&](VarId v) {
    return static_cast<std::size_t>(std::find(task.bag_vars.begin(), task.bag_vars.end(), v) - task.bag_vars.begin());
  };
  auto in_bag_order = [&](std::vector<VarId> vars) {
    std::sort(vars.begin(), vars.end(), [&](VarId a, VarId b) { return bag_pos(a) < bag_pos(b); });
    return vars;
  };
  auto cards_of = [&](const std::vector<VarId>& vars) {
    std::vector<std::uint32_t> c;
    for (auto v : vars) c.push_back(task.bag_cards[bag_pos(v)]);
    return c;
  };
  // Dense table of one input over its scope in bag order.
  auto densify = [&](const FactorTable& f, const std::vector<VarId>& order) {
    const auto cards = cards_of(order);
    std::vector<double> dense(*table_size_u64(cards), 0.0);
    const auto strides = embed_strides(f.scope(), order, cards);
    for (std::size_t r = 0; r < f.size(); ++r) {
      const auto t = f.tuple(r);
      std::uint64_t idx = 0;
      for (std::size_t i = 0; i < t.size(); ++i) idx += t[i] * strides[i];
      dense[idx] = f.prob(r);
    }
    return dense;
  };

  ProductResult out;
  std::vector<const FactorTable*> inputs = task.inputs;
  std::stable_sort(inputs.begin(), inputs.end(),
                   [](const FactorTable* a, const FactorTable* b) { return a->arity() < b->arity(); });

  std::vector<VarId> uvars = in_bag_order(inputs.front()->scope());
  std::vector<double> table = densify(*inputs.front(), uvars);
  out.counters.dense_cells += table.size();
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    if (limits.deadline) limits.deadline->check();
    const FactorTable& f = *inputs[i];
    std::vector<VarId> merged = uvars;
    for (auto v : f.scope())
      if (std::find(merged.begin(), merged.end(), v) == merged.end()) merged.push_back(v);
    merged = in_bag_order(std::move(merged));
    const auto fvars = in_bag_order(f.scope());
    const auto fdense = densify(f, fvars);
    const auto mcards = cards_of(merged);
    std::vector<double> next(*table_size_u64(mcards), 0.0);
    Odometer odo(mcards, {embed_strides(merged, uvars, cards_of(uvars)), embed_strides(merged, fvars, cards_of(fvars))});
    for (std::size_t cell = 0; cell < next.size(); ++cell, odo.next())
      next[cell] = table[odo.offset(0)] * fdense[odo.offset(1)];
    out.counters.dense_cells += next.size();
    table.swap(next);
    uvars = std::move(merged);
  }

  // Extract the listing and the marginal.
  const auto ucards = cards_of(uvars);
  std::vector<VarId> mvars = in_bag_order(task.marginal_vars);
  const auto mcards = cards_of(mvars);
  std::vector<double> msg(*table_size_u64(mcards), 0.0);
  std::vector<Value> rows;
  std::vector<double> probs;
  Odometer odo(ucards, {embed_strides(uvars, mvars, mcards)});
  for (std::size_t cell = 0; cell < table.size(); ++cell, odo.next()) {
    const double p = table[cell];
    if (p == 0.0) continue;
    rows.insert(rows.end(), odo.digits().begin(), odo.digits().end());
    probs.push_back(p);
    msg[odo.offset(0)] += p;
  }
  out.counters.dense_cells += msg.size();
  out.product = FactorTable(uvars, ucards, std::move(rows), std::move(probs));
  out.message = FactorTable::from_dense(mvars, mcards, msg);
  return out;
}

ProductResult run_product(const ProductTask& task, const KernelLimits& limits) {
  return task.strategy == Strategy::Pairwise ? pairwise_prod(task, limits) : mult_fac_prod(task, limits);
}

FactorTable zero_one_projection(const FactorTable& factor, std::span<const VarId> bag_vars) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < factor.arity(); ++i)
    if (std::find(bag_vars.begin(), bag_vars.end(), factor.scope()[i]) != bag_vars.end()) keep.push_back(i);
  if (keep.empty()) throw InvalidArgument("zero_one_projection: factor does not meet the bag");
  std::vector<VarId> scope;
  std::vector<std::uint32_t> cards;
  for (auto i : keep) {
    scope.push_back(factor.scope()[i]);
    cards.push_back(factor.cards()[i]);
  }
  // Equal projections need not be adjacent in the source order: collect, sort, dedupe.
  std::vector<Value> rows;
  std::vector<double> ones;
  for (std::size_t r = 0; r < factor.size(); ++r) {
    const auto t = factor.tuple(r);
    for (auto i : keep) rows.push_back(t[i]);
  }
  const std::size_t k = keep.size();
  const std::size_t n = factor.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(rows.begin() + static_cast<std::ptrdiff_t>(a * k), rows.begin() + static_cast<std::ptrdiff_t>((a + 1) * k),
                                        rows.begin() + static_cast<std::ptrdiff_t>(b * k), rows.begin() + static_cast<std::ptrdiff_t>((b + 1) * k));
  });
  std::vector<Value> uniq;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* row = rows.data() + order[i] * k;
    if (!uniq.empty() && std::equal(row, row + k, uniq.end() - static_cast<std::ptrdiff_t>(k))) continue;
    uniq.insert(uniq.end(), row, row + k);
    ones.push_back(1.0);
  }
  return FactorTable(CanonicalRows{}, std::move(scope), std::move(cards), std::move(uniq), std::move(ones));
}

FactorTable marginalize(const FactorTable& factor, std::span<const VarId> keep) {
  std::vector<std::size_t> pos;
  std::vector<VarId> scope;
  std::vector<std::uint32_t> cards;
  for (std::size_t i = 0; i < factor.arity(); ++i)
    if (std::find(keep.begin(), keep.end(), factor.scope()[i]) != keep.end()) {
      pos.push_back(i);
      scope.push_back(factor.scope()[i]);
      cards.push_back(factor.cards()[i]);
    }
  std::map<std::vector<Value>, double> acc;
  for (std::size_t r = 0; r < factor.size(); ++r) {
    const auto t = factor.tuple(r);
    std::vector<Value> key;
    key.reserve(pos.size());
    for (auto i : pos) key.push_back(t[i]);
    acc[std::move(key)] += factor.prob(r);
  }
  std::vector<Value> rows;
  std::vector<double> probs;
  for (const auto& [key, mass] : acc) {
    if (mass <= 0.0) continue;
    rows.insert(rows.end(), key.begin(), key.end());
    probs.push_back(mass);
  }
  return FactorTable(CanonicalRows{}, std::move(scope), std::move(cards), std::move(rows), std::move(probs));
}

}  // namespace sjt
