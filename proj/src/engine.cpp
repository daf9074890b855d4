#include "sparsejt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sparsejt/deadline.hpp"
#include "sparsejt/errors.hpp"

namespace sjt {

namespace {

// Marginals over the conditioned model back onto the original ids.
MarginalSet expand(const MarginalSet& reduced, const Model& original, const ConditionedModel& cond) {
  MarginalSet out;
  out.log_partition = reduced.log_partition;
  const auto& ev = cond.evidence;
  for (VarId x = 0; x < original.num_variables(); ++x) {
    if (auto it = ev.find(x); it != ev.end()) {
      std::vector<double> point(original.domain_size(x), 0.0);
      point[it->second] = 1.0;
      out.variables.push_back(std::move(point));
    } else {
      out.variables.push_back(reduced.variables.at(*cond.reduced_var[x]));
    }
  }
  for (std::size_t f = 0; f < original.num_factors(); ++f) {
    const auto& fac = original.factor(f);
    std::vector<Value> rows;
    std::vector<double> probs;
    if (cond.reduced_factor[f]) {
      const auto& m = reduced.factors.at(*cond.reduced_factor[f]);
      std::vector<std::size_t> from(fac.arity());  // position in m, or npos for evidence
      for (std::size_t i = 0; i < fac.arity(); ++i) {
        const auto r = cond.reduced_var[fac.scope()[i]];
        from[i] = r ? *m.position(*r) : SIZE_MAX;
      }
      for (std::size_t r = 0; r < m.size(); ++r) {
        const auto t = m.tuple(r);
        for (std::size_t i = 0; i < fac.arity(); ++i)
          rows.push_back(from[i] == SIZE_MAX ? ev.at(fac.scope()[i]) : t[from[i]]);
        probs.push_back(m.prob(r));
      }
    } else {
      for (auto v : fac.scope()) rows.push_back(ev.at(v));
      probs.push_back(1.0);
    }
    out.factors.emplace_back(fac.scope(), fac.cards(), std::move(rows), std::move(probs));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += fmt(xs[i]);
    else
      s += std::to_string(xs[i]);
  }
  return s;
}

}  // namespace

InferenceResult infer(const Model& model, const InferenceOptions& options) {
  validate_evidence(model, model.evidence());
  std::optional<Deadline> deadline;
  if (options.timeout_seconds) deadline.emplace(std::chrono::duration<double>(*options.timeout_seconds));

  InferenceResult res;
  res.conditioned = condition_on_evidence(model);
  const Model& cm = res.conditioned.model;

  std::vector<bool> used(cm.num_variables(), false);
  for (const auto& f : cm.factors())
    for (auto x : f.scope()) used[x] = true;
  std::vector<FactorTable> factors = cm.factors();
  for (VarId x = 0; x < cm.num_variables(); ++x)
    if (!used[x]) factors.push_back(FactorTable::unit({x}, {cm.domain_size(x)}));
  res.working = cm.with_factors(std::move(factors));

  MarginalSet reduced;
  if (res.working.num_variables() == 0) {
    // Everything is fixed by evidence.
    reduced.log_partition = res.working.log_constant();
  } else {
    res.order = min_fill_order(res.working);
    res.ghd = build_ghd(res.working, res.order);
    if (options.root) {
      if (*options.root >= res.ghd.size()) throw InvalidArgument("root bag out of range");
      res.ghd = reroot(res.ghd, *options.root);
    }
    res.predictors = predictors(res.ghd, res.working);
    HybridConfig hc{options.hybrid_beta, options.hybrid_sigma, options.memory_cap};
    res.strategies = assign_strategies(res.ghd, res.working, options.mode, hc);

    PropagationOptions po;
    po.limits.memory_cap = options.memory_cap;
    po.limits.deadline = deadline ? &*deadline : nullptr;
    po.run_both_kernels = options.run_both_kernels;
    res.states = join_infer_up(res.ghd, res.working, res.strategies, po);
    join_infer_down(res.ghd, res.states, po);
    reduced = extract_marginals(res.ghd, res.working, res.states);
    reduced.factors.resize(cm.num_factors());  // drop the unit factors
    res.calibration_error = calibration_error(res.ghd, res.states);
  }
  res.marginals = expand(reduced, model, res.conditioned);
  return res;
}

BoundCheck check_bounds(const std::vector<BagState>& states) {
  BoundCheck c;
  for (const auto& s : states) {
    const auto& run = s.run;
    c.worst_violation = std::max(c.worst_violation, run.cover.max_violation());
    if (run.product_size == 0) continue;
    const double excess = std::log2(static_cast<double>(run.product_size)) - run.cover.log2_bound;
    if (excess > 1e-9) {
      ++c.bags_over;
      c.worst_excess = std::max(c.worst_excess, excess);
    }
  }
  return c;
}

std::string format_stats(const InferenceResult& r) {
  std::ostringstream os;
  const auto& p = r.predictors;
  os << "variables " << r.conditioned.original_num_vars << " free " << r.working.num_variables() << " evidence "
     << r.conditioned.evidence.size() << "\n";
  os << "factors " << r.working.num_factors() << " bags " << r.ghd.size() << " root " << r.ghd.root << "\n";
  os << "tw " << p.tw << "\n";
  os << "fhtw " << fmt(p.fhtw) << "\n";
  os << "log10_rho " << fmt(p.log10_rho) << "\n";
  os << "log10_R_J " << fmt(p.log10_rj) << "\n";
  os << "log10_R_D " << fmt(p.log10_rd) << " (N " << p.max_factor_size << ", D " << p.max_domain << ")\n";
  os << "log_Z " << fmt(r.marginals.log_partition) << "\n";
  for (const auto& d : r.strategies.seeds)
    os << "seed bag " << d.bag << " decision " << static_cast<int>(d.decision) << " log10_truth_table "
       << fmt(d.log10_truth_table) << " log10_agm " << fmt(d.log10_agm) << " min_projection_fraction "
       << fmt(d.min_projection_fraction) << "\n";
  const auto bounds = check_bounds(r.states);
  for (std::size_t v = 0; v < r.states.size(); ++v) {
    const auto& node = r.ghd.nodes[v];
    const auto& run = r.states[v].run;
    os << "bag " << v << " chi {" << join(node.chi) << "} lambda " << node.lambda.size() << " alpha "
       << node.alpha.size() << " strategy " << static_cast<int>(run.strategy) << " inputs "
       << run.factor_inputs << "+" << run.message_inputs << "m+" << run.projections << "p+" << run.unit_inputs
       << "u product " << run.product_size << " message " << run.message_size << " visited " << run.counters.visited
       << " dense " << run.counters.dense_cells << " log10_agm " << fmt(run.cover.log10_bound()) << " x {"
       << join(run.cover.weights) << "} seconds " << fmt(run.seconds);
    if (run.other_counters)
      os << " other_visited " << run.other_counters->visited << " other_dense " << run.other_counters->dense_cells
         << " kernels_agree " << (*run.kernels_agree ? "yes" : "no");
    os << "\n";
  }
  os << "agm_bound " << (bounds.bags_over == 0 ? "ok" : "violated") << " lp_violation " << fmt(bounds.worst_violation)
     << "\n";
  os << "calibration_error " << fmt(r.calibration_error) << "\n";
  return os.str();
}

}  // namespace sjt
