#include "sparsejt/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsejt/errors.hpp"
#include "sparsejt/simplex.hpp"

namespace sjt {

namespace {

double log10_sum_exp(const std::vector<double>& logs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (auto l : logs) mx = std::max(mx, l);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (auto l : logs) acc += std::pow(10.0, l - mx);
  return mx + std::log10(acc);
}

CoverSolution solve(std::span<const VarId> bag_vars, std::vector<CoverEdge> edges, bool unit) {
  CoverSolution sol;
  sol.bag_vars.assign(bag_vars.begin(), bag_vars.end());
  const std::size_t nv = bag_vars.size();
  const std::size_t ne = edges.size();

  // Rows: edges. Columns: bag variables (the packing dual of the cover LP).
  std::vector<std::vector<double>> a(ne, std::vector<double>(nv, 0.0));
  std::vector<double> b(ne);
  bool has_empty_edge = false;
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t j = 0; j < nv; ++j)
      if (std::find(edges[e].scope.begin(), edges[e].scope.end(), bag_vars[j]) != edges[e].scope.end()) a[e][j] = 1.0;
    has_empty_edge = has_empty_edge || edges[e].log2_size == -std::numeric_limits<double>::infinity();
    b[e] = unit ? 1.0 : std::max(edges[e].log2_size, 0.0);
  }
  for (std::size_t j = 0; j < nv; ++j) {
    bool covered = false;
    for (std::size_t e = 0; e < ne && !covered; ++e) covered = a[e][j] != 0.0;
    if (!covered)
      throw InfeasibleCover("fractional cover: variable " + std::to_string(bag_vars[j]) + " lies in no edge");
  }

  std::vector<double> weights(ne, 0.0);
  if (nv > 0) {
    const auto lp = maximize_packing(a, b, std::vector<double>(nv, 1.0));
    weights = lp.dual;
  }
  for (auto& w : weights) w = std::clamp(w, 0.0, 1.0);

  sol.weights = std::move(weights);
  sol.edges = std::move(edges);
  for (std::size_t e = 0; e < ne; ++e) {
    sol.cover_number += sol.weights[e];
    if (sol.weights[e] > 0.0) sol.log2_bound += sol.weights[e] * std::max(sol.edges[e].log2_size, 0.0);
  }
  if (has_empty_edge) sol.log2_bound = -std::numeric_limits<double>::infinity();
  return sol;
}

}  // namespace

CoverEdge CoverEdge::sized(std::vector<VarId> scope, double size) {
  return {std::move(scope), size > 0.0 ? std::log2(size) : -std::numeric_limits<double>::infinity()};
}

double CoverEdge::size() const { return std::exp2(log2_size); }

double CoverSolution::log10_bound() const { return log2_bound * std::log10(2.0); }

double CoverSolution::max_violation() const {
  double worst = 0.0;
  for (auto v : bag_vars) {
    double s = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (std::find(edges[e].scope.begin(), edges[e].scope.end(), v) != edges[e].scope.end()) s += weights[e];
    worst = std::max(worst, 1.0 - s);
  }
  return worst;
}

CoverSolution solve_fractional_cover(std::span<const VarId> bag_vars, std::vector<CoverEdge> edges) {
  return solve(bag_vars, std::move(edges), false);
}

CoverSolution solve_unit_cover(std::span<const VarId> bag_vars, std::vector<CoverEdge> edges) {
  return solve(bag_vars, std::move(edges), true);
}

std::vector<CoverEdge> bag_factor_edges(const Ghd& ghd, const Model& model, std::size_t v) {
  const auto& chi = ghd.nodes[v].chi;
  std::vector<CoverEdge> edges;
  for (const auto& f : model.factors()) {
    std::vector<VarId> scope;
    std::set_intersection(f.scope().begin(), f.scope().end(), chi.begin(), chi.end(), std::back_inserter(scope));
    if (scope.empty()) continue;
    edges.push_back(CoverEdge::sized(std::move(scope), static_cast<double>(f.size())));
  }
  return edges;
}

double fhtw(const Ghd& ghd, const Model& model) {
  double best = 0.0;
  for (std::size_t v = 0; v < ghd.size(); ++v)
    best = std::max(best, solve_unit_cover(ghd.nodes[v].chi, bag_factor_edges(ghd, model, v)).cover_number);
  return best;
}

double log10_rd(double max_factor_size, double fhtw_value, double max_domain, double tw) {
  return fhtw_value * std::log10(max_factor_size) - tw * std::log10(max_domain);
}

Predictors predictors(const Ghd& ghd, const Model& model) {
  Predictors p;
  for (const auto& f : model.factors()) p.max_factor_size = std::max(p.max_factor_size, f.size());
  for (auto d : model.domain_sizes()) p.max_domain = std::max(p.max_domain, d);
  p.tw = ghd.treewidth();
  p.fhtw = fhtw(ghd, model);
  p.log10_rd = log10_rd(static_cast<double>(p.max_factor_size), p.fhtw, static_cast<double>(p.max_domain),
                        static_cast<double>(p.tw));
  const auto r = rho(ghd, model.domain_sizes());
  p.log10_rho = r.log10;

  p.bag_covers.resize(ghd.size());
  std::vector<double> log2_bound(ghd.size(), 0.0);
  for (auto v : ghd.leaves_to_root()) {
    auto edges = bag_factor_edges(ghd, model, v);
    for (auto w : ghd.nodes[v].children) {
      CoverEdge msg;
      msg.scope = ghd.separator(w);
      if (msg.scope.empty()) continue;
      const double tt = TableSize::of_vars(msg.scope, model.domain_sizes()).log10 / std::log10(2.0);
      msg.log2_size = std::min(tt, log2_bound[w]);
      edges.push_back(std::move(msg));
    }
    p.bag_covers[v] = solve_fractional_cover(ghd.nodes[v].chi, std::move(edges));
    p.bag_covers[v].bag = v;
    log2_bound[v] = p.bag_covers[v].log2_bound;
  }
  std::vector<double> logs;
  for (const auto& c : p.bag_covers) logs.push_back(c.log10_bound());
  p.log10_rj = log10_sum_exp(logs) - p.log10_rho;
  return p;
}

}  // namespace sjt
