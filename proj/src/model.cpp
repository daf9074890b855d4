#include "sparsejt/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparsejt/errors.hpp"

namespace sjt {

namespace {

// Sorts rows lexicographically in place (tuples and probs move together).
void sort_rows(std::size_t arity, std::vector<Value>& tuples, std::vector<double>& probs) {
  const std::size_t n = probs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto row = [&](std::size_t i) { return tuples.begin() + static_cast<std::ptrdiff_t>(i * arity); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(row(a), row(a) + static_cast<std::ptrdiff_t>(arity), row(b),
                                        row(b) + static_cast<std::ptrdiff_t>(arity));
  });
  if (std::is_sorted(order.begin(), order.end())) return;
  std::vector<Value> t2(tuples.size());
  std::vector<double> p2(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(row(order[i]), arity, t2.begin() + static_cast<std::ptrdiff_t>(i * arity));
    p2[i] = probs[order[i]];
  }
  tuples.swap(t2);
  probs.swap(p2);
}

}  // namespace

FactorTable::FactorTable(std::vector<VarId> scope, std::vector<std::uint32_t> cards,
                         std::vector<Value> tuples, std::vector<double> probs) {
  const std::size_t arity = scope.size();
  if (cards.size() != arity) throw InvalidArgument("factor: scope and cardinality lengths differ");
  if (tuples.size() != probs.size() * arity)
    throw InvalidArgument("factor: tuple buffer does not match entry count");

  // Permutation that sorts the scope ascending.
  std::vector<std::size_t> perm(arity);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return scope[a] < scope[b]; });
  for (std::size_t i = 0; i + 1 < arity; ++i)
    if (scope[perm[i]] == scope[perm[i + 1]])
      throw InvalidArgument("factor: duplicate variable " + std::to_string(scope[perm[i]]) + " in scope");

  scope_.resize(arity);
  cards_.resize(arity);
  for (std::size_t i = 0; i < arity; ++i) {
    scope_[i] = scope[perm[i]];
    cards_[i] = cards[perm[i]];
    if (cards_[i] == 0) throw InvalidArgument("factor: zero domain size");
  }

  tuples_.reserve(tuples.size());
  probs_.reserve(probs.size());
  for (std::size_t r = 0; r < probs.size(); ++r) {
    const double p = probs[r];
    if (!(p >= 0.0) || std::isinf(p)) throw InvalidArgument("factor: probability must be finite and non-negative");
    if (p == 0.0) continue;
    for (std::size_t i = 0; i < arity; ++i) tuples_.push_back(tuples[r * arity + perm[i]]);
    probs_.push_back(p);
  }
  if (arity == 0 && probs_.size() > 1) throw InvalidArgument("factor: duplicate tuple in scalar factor");
  sort_rows(arity, tuples_, probs_);
  validate();
}

FactorTable::FactorTable(CanonicalRows, std::vector<VarId> scope, std::vector<std::uint32_t> cards,
                         std::vector<Value> tuples, std::vector<double> probs)
    : scope_(std::move(scope)), cards_(std::move(cards)), tuples_(std::move(tuples)), probs_(std::move(probs)) {
#ifndef NDEBUG
  validate();
#endif
}

FactorTable FactorTable::from_dense(std::vector<VarId> scope, std::vector<std::uint32_t> cards,
                                    std::span<const double> values) {
  const auto size = table_size_u64(cards);
  if (!size || *size != values.size()) throw InvalidArgument("factor: dense table size mismatch");
  const std::size_t arity = scope.size();
  std::vector<Value> tuples;
  std::vector<double> probs;
  std::vector<Value> t(arity, 0);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    if (values[idx] != 0.0) {
      tuples.insert(tuples.end(), t.begin(), t.end());
      probs.push_back(values[idx]);
    }
    for (std::size_t k = arity; k-- > 0;) {
      if (++t[k] < cards[k]) break;
      t[k] = 0;
    }
  }
  return FactorTable(std::move(scope), std::move(cards), std::move(tuples), std::move(probs));
}

FactorTable FactorTable::unit(std::vector<VarId> scope, std::vector<std::uint32_t> cards) {
  const auto size = table_size_u64(cards);
  if (!size || *size > (std::uint64_t{1} << 32)) throw ResourceLimit("unit factor too large");
  std::vector<double> ones(*size, 1.0);
  return from_dense(std::move(scope), std::move(cards), ones);
}

void FactorTable::validate() const {
  const std::size_t arity = scope_.size();
  for (std::size_t i = 0; i + 1 < arity; ++i)
    if (scope_[i] >= scope_[i + 1]) throw InvalidArgument("factor: scope not strictly ascending");
  for (std::size_t r = 0; r < probs_.size(); ++r) {
    if (!(probs_[r] > 0.0)) throw InvalidArgument("factor: stored probability must be positive");
    const auto t = tuple(r);
    for (std::size_t i = 0; i < arity; ++i)
      if (t[i] >= cards_[i])
        throw InvalidArgument("factor: value " + std::to_string(t[i]) + " out of domain for variable " +
                              std::to_string(scope_[i]));
    if (r > 0) {
      const auto prev = tuple(r - 1);
      if (!std::lexicographical_compare(prev.begin(), prev.end(), t.begin(), t.end()))
        throw InvalidArgument("factor: duplicate tuple");
    }
  }
}

std::optional<std::size_t> FactorTable::position(VarId var) const {
  auto it = std::lower_bound(scope_.begin(), scope_.end(), var);
  if (it == scope_.end() || *it != var) return std::nullopt;
  return static_cast<std::size_t>(it - scope_.begin());
}

std::optional<std::size_t> FactorTable::find(std::span<const Value> t) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto row = tuple(mid);
    if (std::lexicographical_compare(row.begin(), row.end(), t.begin(), t.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && std::ranges::equal(tuple(lo), t)) return lo;
  return std::nullopt;
}

void FactorTable::drop_zero_rows() {
  const std::size_t arity = scope_.size();
  std::size_t out = 0;
  for (std::size_t r = 0; r < probs_.size(); ++r) {
    if (probs_[r] == 0.0) continue;
    if (out != r) {
      std::copy_n(tuples_.begin() + static_cast<std::ptrdiff_t>(r * arity), arity,
                  tuples_.begin() + static_cast<std::ptrdiff_t>(out * arity));
      probs_[out] = probs_[r];
    }
    ++out;
  }
  probs_.resize(out);
  tuples_.resize(out * arity);
}

double FactorTable::total_mass() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

std::optional<std::uint64_t> table_size_u64(std::span<const std::uint32_t> cards) {
  std::uint64_t size = 1;
  for (auto c : cards) {
    if (c != 0 && size > UINT64_MAX / c) return std::nullopt;
    size *= c;
  }
  return size;
}

double log10_table_size(std::span<const std::uint32_t> cards) {
  double s = 0.0;
  for (auto c : cards) s += std::log10(static_cast<double>(c));
  return s;
}

double factor_sparsity(const FactorTable& factor) {
  if (factor.arity() == 0) throw InvalidArgument("factor_sparsity: empty scope");
  unsigned __int128 denom = 1;
  bool exact = true;
  for (auto c : factor.cards()) {
    const unsigned __int128 limit = ~static_cast<unsigned __int128>(0) / c;
    if (denom > limit) {
      exact = false;
      break;
    }
    denom *= c;
  }
  if (exact) return static_cast<double>(factor.size()) / static_cast<double>(denom);
  if (factor.empty()) return 0.0;
  return std::pow(10.0, std::log10(static_cast<double>(factor.size())) - log10_table_size(factor.cards()));
}

double factor_sparsity(const FactorTable& factor, std::span<const std::uint32_t> domains) {
  for (std::size_t i = 0; i < factor.arity(); ++i) {
    const VarId v = factor.scope()[i];
    if (v >= domains.size()) throw InvalidArgument("factor_sparsity: unknown variable " + std::to_string(v));
    if (domains[v] != factor.cards()[i])
      throw InvalidArgument("factor_sparsity: domain size mismatch for variable " + std::to_string(v));
  }
  return factor_sparsity(factor);
}

Model::Model(std::vector<std::uint32_t> domain_sizes, std::vector<FactorTable> factors, Evidence evidence,
             double log_constant)
    : domains_(std::move(domain_sizes)),
      factors_(std::move(factors)),
      evidence_(std::move(evidence)),
      log_constant_(log_constant) {
  for (auto d : domains_)
    if (d == 0) throw InvalidArgument("model: domain size must be at least 1");
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const auto& fac = factors_[f];
    for (std::size_t i = 0; i < fac.arity(); ++i) {
      const VarId v = fac.scope()[i];
      if (v >= domains_.size())
        throw InvalidArgument("model: factor " + std::to_string(f) + " references undeclared variable " +
                              std::to_string(v));
      if (domains_[v] != fac.cards()[i])
        throw InvalidArgument("model: factor " + std::to_string(f) + " disagrees on domain of variable " +
                              std::to_string(v));
    }
  }
  validate_evidence(*this, evidence_);
}

std::vector<Variable> Model::variables() const {
  std::vector<Variable> vars(domains_.size());
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = {static_cast<VarId>(i), domains_[i]};
  return vars;
}

Model Model::with_evidence(Evidence evidence) const {
  return Model(domains_, factors_, std::move(evidence), log_constant_);
}

Model Model::with_factors(std::vector<FactorTable> factors) const {
  return Model(domains_, std::move(factors), evidence_, log_constant_);
}

void validate_evidence(const Model& model, const Evidence& evidence) {
  for (const auto& [var, value] : evidence) {
    if (var >= model.num_variables())
      throw InvalidArgument("evidence: variable " + std::to_string(var) + " does not exist");
    if (value >= model.domain_size(var))
      throw InvalidArgument("evidence: value " + std::to_string(value) + " out of range for variable " +
                            std::to_string(var));
  }
}

ConditionedModel condition_on_evidence(const Model& model) {
  const Evidence& ev = model.evidence();
  ConditionedModel out;
  out.evidence = ev;
  out.original_num_vars = model.num_variables();
  out.reduced_var.assign(model.num_variables(), std::nullopt);

  std::vector<std::uint32_t> domains;
  for (VarId v = 0; v < model.num_variables(); ++v) {
    if (ev.contains(v)) continue;
    out.reduced_var[v] = static_cast<VarId>(out.original_var.size());
    out.original_var.push_back(v);
    domains.push_back(model.domain_size(v));
  }

  double log_constant = model.log_constant();
  std::vector<FactorTable> factors;
  out.reduced_factor.assign(model.num_factors(), std::nullopt);
  for (std::size_t f = 0; f < model.num_factors(); ++f) {
    const FactorTable& fac = model.factor(f);
    std::vector<std::size_t> keep;   // scope positions that stay free
    std::vector<std::pair<std::size_t, Value>> fixed;
    for (std::size_t i = 0; i < fac.arity(); ++i) {
      auto it = ev.find(fac.scope()[i]);
      if (it == ev.end())
        keep.push_back(i);
      else
        fixed.emplace_back(i, it->second);
    }
    std::vector<VarId> scope;
    std::vector<std::uint32_t> cards;
    for (auto i : keep) {
      scope.push_back(*out.reduced_var[fac.scope()[i]]);
      cards.push_back(fac.cards()[i]);
    }
    std::vector<Value> tuples;
    std::vector<double> probs;
    for (std::size_t r = 0; r < fac.size(); ++r) {
      const auto t = fac.tuple(r);
      bool match = true;
      for (const auto& [i, val] : fixed)
        if (t[i] != val) {
          match = false;
          break;
        }
      if (!match) continue;
      for (auto i : keep) tuples.push_back(t[i]);
      probs.push_back(fac.prob(r));
    }
    if (probs.empty() && !fac.empty() && !fixed.empty())
      throw InconsistentEvidence("evidence contradicts every entry of factor " + std::to_string(f));
    if (scope.empty()) {
      // Fully fixed (or scalar) factor: fold its weight into the constant.
      if (probs.empty()) throw InconsistentEvidence("factor " + std::to_string(f) + " has zero weight");
      log_constant += std::log(probs.front());
      continue;
    }
    out.reduced_factor[f] = factors.size();
    factors.emplace_back(std::move(scope), std::move(cards), std::move(tuples), std::move(probs));
  }
  out.model = Model(std::move(domains), std::move(factors), {}, log_constant);
  return out;
}

}  // namespace sjt
