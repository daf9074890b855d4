#include "sparsejt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparsejt/errors.hpp"

namespace sjt {

MarginalSet brute_force_marginals(const Model& model) {
  const auto& domains = model.domain_sizes();
  const auto& ev = model.evidence();
  validate_evidence(model, ev);
  const std::size_t n = model.num_variables();

  std::vector<VarId> free;
  double joint = 1.0;
  for (VarId x = 0; x < n; ++x)
    if (!ev.contains(x)) {
      free.push_back(x);
      joint *= domains[x];
    }
  if (joint > kBruteForceLimit)
    throw ResourceLimit("oracle: " + std::to_string(joint) + " assignments exceed the enumeration limit");

  // Dense lookup per factor: value and stored row (or -1) by row-major index.
  struct Lookup {
    std::vector<std::uint64_t> stride;  // per scope position
    std::vector<double> value;
    std::vector<std::int64_t> row;
  };
  std::vector<Lookup> lookups;
  for (const auto& f : model.factors()) {
    Lookup lk;
    lk.stride.assign(f.arity(), 0);
    std::uint64_t place = 1;
    for (std::size_t i = f.arity(); i-- > 0;) {
      lk.stride[i] = place;
      place *= f.cards()[i];
    }
    lk.value.assign(place, 0.0);
    lk.row.assign(place, -1);
    for (std::size_t r = 0; r < f.size(); ++r) {
      std::uint64_t idx = 0;
      const auto t = f.tuple(r);
      for (std::size_t i = 0; i < t.size(); ++i) idx += t[i] * lk.stride[i];
      lk.value[idx] = f.prob(r);
      lk.row[idx] = static_cast<std::int64_t>(r);
    }
    lookups.push_back(std::move(lk));
  }

  std::vector<Value> assignment(n, 0);
  for (const auto& [x, val] : ev) assignment[x] = val;
  std::vector<std::vector<double>> var_mass(n);
  for (VarId x = 0; x < n; ++x) var_mass[x].assign(domains[x], 0.0);
  std::vector<std::vector<double>> row_mass(model.num_factors());
  for (std::size_t f = 0; f < model.num_factors(); ++f) row_mass[f].assign(model.factor(f).size(), 0.0);
  std::vector<std::int64_t> hit(model.num_factors());

  double z = 0.0;
  const auto total = static_cast<std::uint64_t>(joint);
  for (std::uint64_t step = 0; step < total; ++step) {
    double p = 1.0;
    for (std::size_t f = 0; f < model.num_factors() && p != 0.0; ++f) {
      const auto& fac = model.factor(f);
      std::uint64_t idx = 0;
      for (std::size_t i = 0; i < fac.arity(); ++i) idx += assignment[fac.scope()[i]] * lookups[f].stride[i];
      p *= lookups[f].value[idx];
      hit[f] = lookups[f].row[idx];
    }
    if (p != 0.0) {
      z += p;
      for (VarId x = 0; x < n; ++x) var_mass[x][assignment[x]] += p;
      for (std::size_t f = 0; f < model.num_factors(); ++f) row_mass[f][static_cast<std::size_t>(hit[f])] += p;
    }
    for (std::size_t k = free.size(); k-- > 0;) {
      if (++assignment[free[k]] < domains[free[k]]) break;
      assignment[free[k]] = 0;
    }
  }
  if (!(z > 0.0)) throw InconsistentEvidence("oracle: zero total mass");

  MarginalSet out;
  out.log_partition = std::log(z) + model.log_constant();
  out.variables = std::move(var_mass);
  for (auto& dist : out.variables)
    for (auto& p : dist) p /= z;
  for (std::size_t f = 0; f < model.num_factors(); ++f) {
    const auto& fac = model.factor(f);
    std::vector<Value> rows;
    std::vector<double> probs;
    for (std::size_t r = 0; r < fac.size(); ++r) {
      if (row_mass[f][r] == 0.0) continue;
      const auto t = fac.tuple(r);
      rows.insert(rows.end(), t.begin(), t.end());
      probs.push_back(row_mass[f][r] / z);
    }
    out.factors.emplace_back(CanonicalRows{}, fac.scope(), fac.cards(), std::move(rows), std::move(probs));
  }
  return out;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_below: empty range");
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t x;
  do x = rng();
  while (x > limit);
  return x % bound;
}

Model induce_sparsity(const Model& model, double keep_fraction, std::uint64_t seed) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw InvalidArgument("induce_sparsity: keep fraction must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::vector<FactorTable> out;
  for (const auto& f : model.factors()) {
    const std::size_t n = f.size();
    auto k = static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, n == 0 ? 0 : 1, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + uniform_below(rng, n - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    std::vector<Value> rows;
    std::vector<double> probs;
    for (auto r : idx) {
      const auto t = f.tuple(r);
      rows.insert(rows.end(), t.begin(), t.end());
      probs.push_back(f.prob(r));
    }
    out.emplace_back(CanonicalRows{}, f.scope(), f.cards(), std::move(rows), std::move(probs));
  }
  return model.with_factors(std::move(out));
}

ComparisonReport compare_marginals(const MarginalSet& a, const MarginalSet& b, double tolerance) {
  if (a.variables.size() != b.variables.size()) throw InvalidArgument("compare_marginals: variable counts differ");
  ComparisonReport rep;
  for (VarId x = 0; x < a.variables.size(); ++x) {
    if (a.variables[x].size() != b.variables[x].size())
      throw InvalidArgument("compare_marginals: domain of variable " + std::to_string(x) + " differs");
    for (std::size_t i = 0; i < a.variables[x].size(); ++i) {
      const double d = std::abs(a.variables[x][i] - b.variables[x][i]);
      if (d > rep.max_abs_error) {
        rep.max_abs_error = d;
        rep.worst_variable = x;
      }
    }
  }
  rep.passed = rep.max_abs_error <= tolerance;
  return rep;
}

}  // namespace sjt
