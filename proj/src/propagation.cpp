#include "sparsejt/propagation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "sparsejt/errors.hpp"

namespace sjt {

namespace {

constexpr double kScaleLow = 1e-300;
constexpr double kScaleHigh = 1e300;

bool close_tables(const FactorTable& a, const FactorTable& b, double rel) {
  if (a.scope() != b.scope() || a.size() != b.size()) return false;
  if (!std::ranges::equal(a.flat_tuples(), b.flat_tuples())) return false;
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double x = a.prob(r), y = b.prob(r);
    if (std::abs(x - y) > rel * std::max(std::abs(x), std::abs(y))) return false;
  }
  return true;
}

// Maps rows of a table onto the entries of a message over a subset of its scope.
class SlotLocator {
 public:
  SlotLocator(const FactorTable& table, const BagState& target) : target_(target) {
    const auto& sep = target.up_message.scope();
    for (auto v : sep) pos_.push_back(*table.position(v));
    if (target.up_index) strides_ = index_strides(target.up_index->radices(), IndexDirection::Reverse);
    key_.resize(sep.size());
  }

  std::size_t slot(std::span<const Value> row) {
    if (target_.up_index) {
      std::uint64_t idx = 0;
      for (std::size_t i = 0; i < pos_.size(); ++i) idx += row[pos_[i]] * strides_[i];
      return target_.up_index->locate_reverse(idx);
    }
    for (std::size_t i = 0; i < pos_.size(); ++i) key_[i] = row[pos_[i]];
    return target_.up_message.find(key_).value_or(target_.up_message.size());
  }

  std::size_t slots() const { return target_.up_message.size(); }

 private:
  const BagState& target_;
  std::vector<std::size_t> pos_;
  std::vector<std::uint64_t> strides_;
  std::vector<Value> key_;
};

std::span<const double> up_probs(const BagState& s) {
  return s.up_index ? s.up_index->probs() : s.up_message.probs();
}

void rescale(BagState& s) {
  double top = 0.0;
  for (double p : s.product.probs()) top = std::max(top, p);
  if (top == 0.0 || (top >= kScaleLow && top <= kScaleHigh)) return;
  for (double& p : s.product.mutable_probs()) p /= top;
  for (double& p : s.up_message.mutable_probs()) p /= top;
  s.product.drop_zero_rows();
  s.up_message.drop_zero_rows();
  s.log_scale = std::log(top);
}

}  // namespace

std::vector<BagState> join_infer_up(const Ghd& ghd, const Model& model, const StrategyMap& strategies,
                                    const PropagationOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto& domains = model.domain_sizes();
  std::vector<BagState> states(ghd.size());

  for (auto v : ghd.leaves_to_root()) {
    if (options.limits.deadline) options.limits.deadline->check();
    const auto start = clock::now();
    const auto& node = ghd.nodes[v];
    BagState& state = states[v];
    BagRun& run = state.run;
    run.strategy = strategies.at(v);

    std::vector<VarId> sep = node.parent ? ghd.separator(v) : std::vector<VarId>{};
    ProductTask task;
    task.strategy = run.strategy;
    task.marginal_vars = sep;
    task.bag_vars = sep;
    for (auto x : node.chi)
      if (!std::binary_search(sep.begin(), sep.end(), x)) task.bag_vars.push_back(x);
    for (auto x : task.bag_vars) task.bag_cards.push_back(domains[x]);

    std::vector<FactorTable> owned;  // projections and unit factors
    owned.reserve(model.num_factors() + node.chi.size());
    for (auto f : node.alpha) task.inputs.push_back(&model.factor(f));
    run.factor_inputs = node.alpha.size();
    for (auto c : node.children) task.inputs.push_back(&states[c].up_message);
    run.message_inputs = node.children.size();
    if (run.strategy == Strategy::MultiwayProjected) {
      for (std::size_t f = 0; f < model.num_factors(); ++f) {
        if (std::binary_search(node.lambda.begin(), node.lambda.end(), f)) continue;
        const auto& fac = model.factor(f);
        const bool meets = std::ranges::any_of(fac.scope(), [&](VarId x) {
          return std::binary_search(node.chi.begin(), node.chi.end(), x);
        });
        if (!meets) continue;
        owned.push_back(zero_one_projection(fac, node.chi));
        ++run.projections;
      }
    }
    std::vector<bool> covered(domains.size(), false);
    for (const auto* in : task.inputs)
      for (auto x : in->scope()) covered[x] = true;
    for (const auto& in : owned)
      for (auto x : in.scope()) covered[x] = true;
    for (auto x : node.chi)
      if (!covered[x]) {
        owned.push_back(FactorTable::unit({x}, {domains[x]}));
        ++run.unit_inputs;
      }
    for (const auto& in : owned) task.inputs.push_back(&in);

    std::vector<CoverEdge> edges;
    for (const auto* in : task.inputs) edges.push_back(CoverEdge::sized(in->scope(), static_cast<double>(in->size())));
    run.cover = solve_fractional_cover(node.chi, std::move(edges));
    run.cover.bag = v;

    ProductResult result;
    try {
      result = run_product(task, options.limits);
      if (options.run_both_kernels) {
        ProductTask other = task;
        other.strategy = task.strategy == Strategy::Pairwise ? Strategy::Multiway : Strategy::Pairwise;
        const auto cap = table_size_u64(task.bag_cards);
        if (other.strategy != Strategy::Pairwise || (cap && *cap <= options.limits.memory_cap)) {
          auto alt = run_product(other, options.limits);
          run.other_counters = alt.counters;
          run.kernels_agree = close_tables(alt.product, result.product, 1e-12) &&
                              close_tables(alt.message, result.message, 1e-12);
        }
      }
    } catch (const ResourceLimit& e) {
      throw ResourceLimit("bag " + std::to_string(v) + ": " + e.what());
    }
    state.product = std::move(result.product);
    state.up_message = std::move(result.message);
    run.counters = result.counters;
    run.product_size = state.product.size();
    run.message_size = state.up_message.size();
    rescale(state);
    if (node.parent) {
      try {
        state.up_index = build_index_list(state.up_message, IndexKind::ForwardAndReverse);
      } catch (const IndexOverflow&) {
        state.up_index.reset();
      }
    }
    run.seconds = std::chrono::duration<double>(clock::now() - start).count();
  }
  return states;
}

void join_infer_down(const Ghd& ghd, std::vector<BagState>& states, const PropagationOptions& options) {
  auto order = ghd.leaves_to_root();
  std::reverse(order.begin(), order.end());
  for (auto u : order) {
    if (options.limits.deadline) options.limits.deadline->check();
    const auto& parent = states[u].product;
    for (auto c : ghd.nodes[u].children) {
      BagState& child = states[c];
      SlotLocator from_parent(parent, child);
      child.down_message.assign(from_parent.slots(), 0.0);
      for (std::size_t r = 0; r < parent.size(); ++r) {
        const auto s = from_parent.slot(parent.tuple(r));
        if (s < from_parent.slots()) child.down_message[s] += parent.prob(r);
      }

      const auto up = up_probs(child);
      SlotLocator own(child.product, child);
      auto probs = child.product.mutable_probs();
      bool zeroed = false;
      for (std::size_t r = 0; r < child.product.size(); ++r) {
        const auto s = own.slot(child.product.tuple(r));
        const double ratio = (s < up.size() && up[s] > 0.0) ? child.down_message[s] / up[s] : 0.0;
        probs[r] *= ratio;
        zeroed = zeroed || probs[r] == 0.0;
      }
      if (zeroed) child.product.drop_zero_rows();
    }
  }
}

double log_partition(const Ghd& ghd, const Model& model, const std::vector<BagState>& states) {
  const double mass = states.at(ghd.root).product.total_mass();
  if (!(mass > 0.0)) throw InconsistentEvidence("the model has zero total mass under the evidence");
  double log_z = std::log(mass) + model.log_constant();
  for (const auto& s : states) log_z += s.log_scale;
  return log_z;
}

MarginalSet extract_marginals(const Ghd& ghd, const Model& model, const std::vector<BagState>& states) {
  MarginalSet out;
  out.log_partition = log_partition(ghd, model, states);
  const auto& domains = model.domain_sizes();

  std::vector<std::optional<std::size_t>> home(model.num_variables());
  std::vector<TableSize> sizes;
  for (std::size_t v = 0; v < ghd.size(); ++v) sizes.push_back(TableSize::of_vars(ghd.nodes[v].chi, domains));
  for (std::size_t v = 0; v < ghd.size(); ++v)
    for (auto x : ghd.nodes[v].chi)
      if (!home[x] || sizes[v] < sizes[*home[x]]) home[x] = v;

  out.variables.resize(model.num_variables());
  for (VarId x = 0; x < model.num_variables(); ++x) {
    if (!home[x]) throw Error("variable " + std::to_string(x) + " lies in no bag");
    const auto& prod = states[*home[x]].product;
    const double mass = prod.total_mass();
    const auto pos = *prod.position(x);
    auto& dist = out.variables[x];
    dist.assign(domains[x], 0.0);
    for (std::size_t r = 0; r < prod.size(); ++r) dist[prod.tuple(r)[pos]] += prod.prob(r);
    for (auto& p : dist) p /= mass;
  }

  out.factors.resize(model.num_factors());
  for (std::size_t v = 0; v < ghd.size(); ++v)
    for (auto f : ghd.nodes[v].alpha) {
      const auto& prod = states[v].product;
      FactorTable m = marginalize(prod, model.factor(f).scope());
      const double mass = prod.total_mass();
      for (auto& p : m.mutable_probs()) p /= mass;
      out.factors[f] = std::move(m);
    }
  return out;
}

double calibration_error(const Ghd& ghd, const std::vector<BagState>& states) {
  double worst = 0.0;
  for (std::size_t v = 0; v < ghd.size(); ++v) {
    if (!ghd.nodes[v].parent) continue;
    const auto sep = ghd.separator(v);
    const auto a = marginalize(states[v].product, sep);
    const auto b = marginalize(states[*ghd.nodes[v].parent].product, sep);
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      const bool take_a = j == b.size() || (i < a.size() && std::ranges::lexicographical_compare(a.tuple(i), b.tuple(j)));
      const bool take_b = i == a.size() || (j < b.size() && std::ranges::lexicographical_compare(b.tuple(j), a.tuple(i)));
      if (take_a) {
        worst = std::max(worst, 1.0);
        ++i;
      } else if (take_b) {
        worst = std::max(worst, 1.0);
        ++j;
      } else {
        const double x = a.prob(i++), y = b.prob(j++);
        worst = std::max(worst, std::abs(x - y) / std::max(std::abs(x), std::abs(y)));
      }
    }
  }
  return worst;
}

}  // namespace sjt
