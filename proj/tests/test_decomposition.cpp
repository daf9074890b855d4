#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "sparsejt/decomposition.hpp"
#include "support/random_models.hpp"

using namespace sjt;

namespace {

FactorTable ones(std::vector<VarId> scope, std::vector<std::uint32_t> cards) { return FactorTable::unit(scope, cards); }

Model graph_model(std::size_t n, const std::vector<std::pair<VarId, VarId>>& edges, std::uint32_t d = 2) {
  std::vector<FactorTable> fs;
  for (auto [a, b] : edges) fs.push_back(ones({a, b}, {d, d}));
  return Model(std::vector<std::uint32_t>(n, d), std::move(fs));
}

using Adj = std::vector<std::vector<bool>>;

Adj primal(const Model& m) {
  Adj g(m.num_variables(), std::vector<bool>(m.num_variables(), false));
  for (const auto& f : m.factors())
    for (auto a : f.scope())
      for (auto b : f.scope())
        if (a != b) g[a][b] = true;
  return g;
}

// Eliminates along `order`; returns (fill edges, largest elimination clique) and the fill-in graph.
std::pair<std::size_t, std::size_t> eliminate(Adj g, const std::vector<VarId>& order, Adj* filled = nullptr) {
  const std::size_t n = g.size();
  Adj all = g;
  std::vector<bool> gone(n, false);
  std::size_t fill = 0, width = 0;
  for (auto v : order) {
    std::vector<VarId> nb;
    for (VarId u = 0; u < n; ++u)
      if (!gone[u] && g[v][u]) nb.push_back(u);
    width = std::max(width, nb.size() + 1);
    for (auto a : nb)
      for (auto b : nb)
        if (a < b && !g[a][b]) {
          g[a][b] = g[b][a] = true;
          all[a][b] = all[b][a] = true;
          ++fill;
        }
    gone[v] = true;
  }
  if (filled) *filled = all;
  return {fill, width};
}

std::size_t max_clique(const Adj& g) {
  const std::size_t n = g.size();
  std::size_t best = n ? 1 : 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto k = static_cast<std::size_t>(__builtin_popcount(mask));
    if (k <= best) continue;
    bool clique = true;
    for (std::size_t a = 0; a < n && clique; ++a)
      for (std::size_t b = a + 1; b < n && clique; ++b)
        if ((mask >> a & 1) && (mask >> b & 1) && !g[a][b]) clique = false;
    if (clique) best = k;
  }
  return best;
}

// Minimum over all orders of the largest elimination clique.
std::size_t exact_width(const Model& m) {
  std::vector<VarId> order(m.num_variables());
  std::iota(order.begin(), order.end(), 0);
  const auto g = primal(m);
  std::size_t best = SIZE_MAX;
  do best = std::min(best, eliminate(g, order).second);
  while (std::next_permutation(order.begin(), order.end()));
  return best;
}

}  // namespace

TEST_CASE("min-fill on a triangle adds nothing") {
  const auto m = graph_model(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto order = min_fill_order(m);
  CHECK(order == std::vector<VarId>{0, 1, 2});
  CHECK(count_fill_edges(m, order) == 0);
}

TEST_CASE("path and 4-cycle fill counts match enumeration") {
  const auto path = graph_model(3, {{0, 1}, {1, 2}});
  const auto po = min_fill_order(path);
  CHECK((po.front() == 0 || po.front() == 2));
  CHECK(count_fill_edges(path, po) == 0);
  std::vector<VarId> all{0, 1, 2};
  std::size_t best = SIZE_MAX;
  do best = std::min(best, eliminate(primal(path), all).first);
  while (std::next_permutation(all.begin(), all.end()));
  CHECK(best == 0);

  const auto cycle = graph_model(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  std::vector<VarId> o4{0, 1, 2, 3};
  do CHECK(eliminate(primal(cycle), o4).first == 1);
  while (std::next_permutation(o4.begin(), o4.end()));
  const auto co = min_fill_order(cycle);
  CHECK(count_fill_edges(cycle, co) == 1);
  CHECK(count_fill_edges(cycle, co) == eliminate(primal(cycle), co).first);
}

TEST_CASE("triangle decomposes into one bag") {
  const auto m = graph_model(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto g = build_ghd(m, min_fill_order(m));
  REQUIRE(g.size() == 1);
  CHECK(g.nodes[0].chi == std::vector<VarId>{0, 1, 2});
  CHECK(g.nodes[0].alpha.size() == 3);
  CHECK(g.treewidth() == 3);
}

TEST_CASE("path decomposes into two bags") {
  const auto m = graph_model(3, {{0, 1}, {1, 2}});
  const auto g = build_ghd(m, min_fill_order(m));
  REQUIRE(g.size() == 2);
  std::set<std::vector<VarId>> bags{g.nodes[0].chi, g.nodes[1].chi};
  CHECK(bags == std::set<std::vector<VarId>>{{0, 1}, {1, 2}});
  const std::size_t child = g.root == 0 ? 1 : 0;
  CHECK(g.separator(child) == std::vector<VarId>{1});
  CHECK(g.treewidth() == 2);
  CHECK(g.root == 0);  // equal truth tables: smallest id
}

TEST_CASE("disconnected factors share one tree") {
  Model m({2, 3}, {ones({0}, {2}), ones({1}, {3})});
  const auto g = build_ghd(m, min_fill_order(m));
  REQUIRE(g.size() == 2);
  CHECK(g.edges.size() == 1);
  const std::size_t child = g.root == 0 ? 1 : 0;
  CHECK(g.separator(child).empty());
  CHECK(g.nodes[g.root].chi == std::vector<VarId>{1});  // the larger bag
}

TEST_CASE("rho") {
  Model one({3, 3}, {ones({0, 1}, {3, 3})});
  const auto g1 = build_ghd(one, min_fill_order(one));
  const auto r1 = rho(g1, one.domain_sizes());
  CHECK(r1.exact);
  CHECK(static_cast<std::uint64_t>(*r1.exact) == 9);

  const auto path = graph_model(3, {{0, 1}, {1, 2}});
  const auto r2 = rho(build_ghd(path, min_fill_order(path)), path.domain_sizes());
  CHECK(static_cast<std::uint64_t>(*r2.exact) == 8);
  CHECK(r2.value() == 8.0);
}

TEST_CASE("rho of a 44^8 bag exceeds 10^9") {
  std::vector<VarId> vars(8);
  std::iota(vars.begin(), vars.end(), 0);
  Ghd g;
  g.nodes.push_back({vars, {}, {}, std::nullopt, {}});
  const std::vector<std::uint32_t> domains(8, 44);
  const auto r = rho(g, domains);
  CHECK(r.log10 == doctest::Approx(8 * std::log10(44.0)));
  CHECK(r.log10 > 9.0);
  CHECK(r.value() == doctest::Approx(1.4048223625216e13));
}

TEST_CASE("rho beyond 128 bits stays in log space") {
  std::vector<VarId> vars(5);
  std::iota(vars.begin(), vars.end(), 0);
  Ghd g;
  g.nodes.push_back({vars, {}, {}, std::nullopt, {}});
  const std::vector<std::uint32_t> domains(5, 4000000000u);
  const auto r = rho(g, domains);
  CHECK(!r.exact);
  CHECK(r.log10 == doctest::Approx(5 * std::log10(4e9)));
}

TEST_CASE("random decompositions satisfy the structural properties") {
  testing::RandomModelSpec spec;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto m = testing::random_model(seed, spec);
    const auto order = min_fill_order(m);
    const auto g = build_ghd(m, order);
    CHECK(has_coverage(g, m));
    CHECK(has_running_intersection(g, m.num_variables()));
    CHECK(has_unique_assignment(g, m));
    CHECK(count_fill_edges(m, order) == eliminate(primal(m), order).first);
    // Each factor sits in the smallest containing bag.
    const auto& dom = m.domain_sizes();
    for (std::size_t v = 0; v < g.size(); ++v)
      for (auto f : g.nodes[v].alpha)
        for (std::size_t u = 0; u < g.size(); ++u) {
          const auto& chi = g.nodes[u].chi;
          const auto& sc = m.factor(f).scope();
          if (std::includes(chi.begin(), chi.end(), sc.begin(), sc.end()))
            CHECK(!(TableSize::of_vars(chi, dom) < TableSize::of_vars(g.nodes[v].chi, dom)));
        }
    // Root has the largest truth table.
    for (std::size_t u = 0; u < g.size(); ++u)
      CHECK(!(TableSize::of_vars(g.nodes[g.root].chi, dom) < TableSize::of_vars(g.nodes[u].chi, dom)));
    // Bags are maximal.
    for (std::size_t u = 0; u < g.size(); ++u)
      for (std::size_t w = 0; w < g.size(); ++w)
        if (u != w) {
          const auto& a = g.nodes[u].chi;
          const auto& b = g.nodes[w].chi;
          CHECK(!std::includes(b.begin(), b.end(), a.begin(), a.end()));
        }
  }
}

TEST_CASE("bag width equals the fill-in graph's largest clique and bounds the exact treewidth") {
  testing::RandomModelSpec spec;
  spec.max_vars = 8;
  std::size_t optimal = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto m = testing::random_model(seed, spec);
    const auto order = min_fill_order(m);
    const auto g = build_ghd(m, order);
    Adj filled;
    eliminate(primal(m), order, &filled);
    CHECK(g.treewidth() == max_clique(filled));
    const auto exact = exact_width(m);
    CHECK(g.treewidth() >= exact);
    optimal += g.treewidth() == exact;
    ++total;
  }
  MESSAGE("min-fill width optimal on " << optimal << " of " << total);
  CHECK(optimal * 10 >= total * 9);
}

TEST_CASE("rerooting keeps the tree and the properties") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto m = testing::random_model(seed);
    const auto g = build_ghd(m, min_fill_order(m));
    for (std::size_t r = 0; r < g.size(); ++r) {
      const auto h = reroot(g, r);
      CHECK(h.root == r);
      CHECK(!h.nodes[r].parent);
      CHECK(has_running_intersection(h, m.num_variables()));
      CHECK(has_unique_assignment(h, m));
      const auto order = h.leaves_to_root();
      std::vector<std::size_t> seen_at(h.size());
      for (std::size_t i = 0; i < order.size(); ++i) seen_at[order[i]] = i;
      for (std::size_t v = 0; v < h.size(); ++v)
        if (h.nodes[v].parent) CHECK(seen_at[v] < seen_at[*h.nodes[v].parent]);
    }
  }
}
