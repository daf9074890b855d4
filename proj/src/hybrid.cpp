#include "sparsejt/hybrid.hpp"

#include <algorithm>
#include <cmath>

#include "sparsejt/cover.hpp"

namespace sjt {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Multiway:
      return "multiway";
    case Mode::Multiway01:
      return "multiway01";
    case Mode::Pairwise:
      return "pairwise";
    case Mode::Hybrid:
      return "hybrid";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (auto m : {Mode::Multiway, Mode::Multiway01, Mode::Pairwise, Mode::Hybrid})
    if (to_string(m) == text) return m;
  return std::nullopt;
}

StrategyMap StrategyMap::constant(std::size_t bags, Strategy s) {
  StrategyMap map;
  map.assignment.assign(bags, s);
  map.region.assign(bags, kDefaultRegion);
  return map;
}

namespace {

bool within_cap(const TableSize& size, std::uint64_t cap) { return size.exact && *size.exact <= cap; }

SeedDecision decide(const Ghd& ghd, const Model& model, std::size_t v, const HybridConfig& config) {
  const auto& node = ghd.nodes[v];
  const auto& domains = model.domain_sizes();
  SeedDecision d;
  d.bag = v;
  const auto tt = TableSize::of_vars(node.chi, domains);
  d.log10_truth_table = tt.log10;

  // AGM bound from the bag's own factors; messages are ignored here.
  std::vector<CoverEdge> edges;
  std::vector<bool> covered(node.chi.size(), false);
  for (auto f : node.alpha) {
    const auto& fac = model.factor(f);
    edges.push_back(CoverEdge::sized(fac.scope(), static_cast<double>(fac.size())));
    for (std::size_t i = 0; i < node.chi.size(); ++i) covered[i] = covered[i] || fac.contains(node.chi[i]);
  }
  for (std::size_t i = 0; i < node.chi.size(); ++i)
    if (!covered[i]) edges.push_back(CoverEdge::sized({node.chi[i]}, domains[node.chi[i]]));
  d.log10_agm = solve_fractional_cover(node.chi, std::move(edges)).log10_bound();

  for (std::size_t f = 0; f < model.num_factors(); ++f) {
    if (std::find(node.lambda.begin(), node.lambda.end(), f) != node.lambda.end()) continue;
    const auto& fac = model.factor(f);
    std::vector<VarId> meet;
    std::set_intersection(fac.scope().begin(), fac.scope().end(), node.chi.begin(), node.chi.end(),
                          std::back_inserter(meet));
    if (meet.empty()) continue;
    const auto proj = zero_one_projection(fac, node.chi);
    const double frac = std::pow(10.0, std::log10(static_cast<double>(std::max<std::size_t>(proj.size(), 1))) -
                                           log10_table_size(proj.cards()));
    d.min_projection_fraction = std::min(d.min_projection_fraction, proj.empty() ? 0.0 : frac);
  }
  d.fallback = d.min_projection_fraction < config.sigma ? Strategy::MultiwayProjected : Strategy::Multiway;
  const bool pairwise =
      within_cap(tt, config.memory_cap) && d.log10_truth_table <= std::log10(config.beta) + d.log10_agm + 1e-12;
  d.decision = pairwise ? Strategy::Pairwise : d.fallback;
  return d;
}

}  // namespace

StrategyMap assign_strategies(const Ghd& ghd, const Model& model, Mode mode, const HybridConfig& config) {
  switch (mode) {
    case Mode::Multiway:
      return StrategyMap::constant(ghd.size(), Strategy::Multiway);
    case Mode::Multiway01:
      return StrategyMap::constant(ghd.size(), Strategy::MultiwayProjected);
    case Mode::Pairwise:
      return StrategyMap::constant(ghd.size(), Strategy::Pairwise);
    case Mode::Hybrid:
      break;
  }

  const auto& domains = model.domain_sizes();
  std::vector<TableSize> sizes(ghd.size());
  for (std::size_t v = 0; v < ghd.size(); ++v) sizes[v] = TableSize::of_vars(ghd.nodes[v].chi, domains);

  std::vector<std::size_t> order;
  for (std::size_t v = 0; v < ghd.size(); ++v)
    if (!ghd.nodes[v].alpha.empty()) order.push_back(v);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sizes[b] < sizes[a]; });

  StrategyMap map = StrategyMap::constant(ghd.size(), Strategy::Multiway);
  std::vector<bool> decided(ghd.size(), false);
  auto settle = [&](std::size_t v, const SeedDecision& d, std::size_t region) {
    const bool pairwise_ok = within_cap(sizes[v], config.memory_cap);
    map.assignment[v] = (d.decision == Strategy::Pairwise && !pairwise_ok) ? d.fallback : d.decision;
    map.region[v] = region;
    decided[v] = true;
  };

  for (auto seed : order) {
    if (decided[seed]) continue;
    const auto d = decide(ghd, model, seed, config);
    map.seeds.push_back(d);
    std::vector<std::size_t> stack{seed};
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      settle(v, d, seed);
      for (auto c : ghd.nodes[v].children)
        if (!decided[c]) stack.push_back(c);
    }
  }

  if (!map.seeds.empty()) {
    const auto& first = map.seeds.front();
    for (std::size_t v = 0; v < ghd.size(); ++v)
      if (!decided[v]) {
        settle(v, first, StrategyMap::kDefaultRegion);
      }
  }
  return map;
}

}  // namespace sjt
