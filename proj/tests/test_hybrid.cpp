#include <doctest.h>

#include <cmath>

#include "sparsejt/engine.hpp"
#include "sparsejt/hybrid.hpp"
#include "support/random_models.hpp"

using namespace sjt;

namespace {

bool regions_connected(const Ghd& g, const StrategyMap& map) {
  // A region is connected iff exactly one of its bags has a parent outside it.
  std::map<std::size_t, std::size_t> tops;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto reg = map.region[v];
    if (reg == StrategyMap::kDefaultRegion) continue;
    const auto p = g.nodes[v].parent;
    if (!p || map.region[*p] != reg) ++tops[reg];
  }
  for (auto [reg, n] : tops)
    if (n != 1) return false;
  return true;
}

}  // namespace

TEST_CASE("fixed modes give constant maps") {
  const auto m = testing::random_model(1);
  const auto g = build_ghd(m, min_fill_order(m));
  for (auto [mode, s] : {std::pair{Mode::Multiway, Strategy::Multiway}, std::pair{Mode::Multiway01, Strategy::MultiwayProjected},
                         std::pair{Mode::Pairwise, Strategy::Pairwise}}) {
    const auto map = assign_strategies(g, m, mode);
    REQUIRE(map.assignment.size() == g.size());
    for (auto a : map.assignment) CHECK(a == s);
  }
}

TEST_CASE("mode names round-trip") {
  for (auto m : {Mode::Multiway, Mode::Multiway01, Mode::Pairwise, Mode::Hybrid}) CHECK(parse_mode(to_string(m)) == m);
  CHECK(!parse_mode("dense"));
}

TEST_CASE("dense three-bag chain goes pairwise everywhere") {
  // Factors AB, BC, CD, all full tables over domain 3.
  std::vector<FactorTable> fs;
  for (VarId i = 0; i < 3; ++i) fs.push_back(FactorTable::unit({i, i + 1}, {3, 3}));
  Model m({3, 3, 3, 3}, fs);
  const auto g = build_ghd(m, min_fill_order(m));
  REQUIRE(g.size() == 3);
  const auto map = assign_strategies(g, m, Mode::Hybrid);
  // Each seed: truth table 9, AGM bound of its one full factor 9, so 9 <= 1 * 9.
  for (const auto& d : map.seeds) {
    CHECK(d.log10_truth_table == doctest::Approx(std::log10(9.0)));
    CHECK(d.log10_agm == doctest::Approx(std::log10(9.0)));
  }
  for (auto a : map.assignment) CHECK(a == Strategy::Pairwise);
}

TEST_CASE("sparse seed falls back to multiway, with projections when they prune") {
  // Bag {0,1} holds a diagonal factor over domain 10 (10 of 100 entries);
  // bag {1,2} holds a 2-entry factor so its projection onto {1} covers 2 of 10 values.
  std::vector<Value> diag;
  std::vector<double> ones;
  for (Value a = 0; a < 10; ++a) {
    diag.insert(diag.end(), {a, a});
    ones.push_back(1.0);
  }
  FactorTable d({0, 1}, {10, 10}, diag, ones);
  FactorTable e({1, 2}, {10, 10}, {0, 0, 1, 5}, {1.0, 1.0});
  Model m({10, 10, 10}, {d, e});
  const auto g = build_ghd(m, min_fill_order(m));
  HybridConfig cfg;
  const auto map = assign_strategies(g, m, Mode::Hybrid, cfg);
  for (std::size_t v = 0; v < g.size(); ++v) CHECK(map.assignment[v] == Strategy::MultiwayProjected);
  cfg.sigma = 0.1;  // 0.2 is no longer small enough
  const auto plain = assign_strategies(g, m, Mode::Hybrid, cfg);
  for (auto a : plain.assignment) CHECK(a == Strategy::Multiway);
  cfg.beta = 100.0;  // 100 <= 100 * 10
  const auto loose = assign_strategies(g, m, Mode::Hybrid, cfg);
  for (auto a : loose.assignment) CHECK(a == Strategy::Pairwise);
}

TEST_CASE("bags above the cap are never pairwise") {
  std::vector<FactorTable> fs{FactorTable::unit({0, 1}, {300, 300}), FactorTable::unit({1, 2}, {300, 2})};
  Model m({300, 300, 2}, fs);
  auto g = build_ghd(m, min_fill_order(m));
  REQUIRE(g.size() == 2);
  // Rooted at the small bag, the big seed's subtree is just itself.
  g = reroot(g, g.nodes[0].chi.size() == 2 && g.nodes[0].chi[1] == 2 ? 0 : 1);
  HybridConfig cfg;
  cfg.memory_cap = 1000;
  const auto map = assign_strategies(g, m, Mode::Hybrid, cfg);
  bool small_pairwise = false;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto tt = TableSize::of_vars(g.nodes[v].chi, m.domain_sizes());
    if (*tt.exact > cfg.memory_cap) CHECK(map.assignment[v] != Strategy::Pairwise);
    else small_pairwise = small_pairwise || map.assignment[v] == Strategy::Pairwise;
  }
  CHECK(small_pairwise);
}

TEST_CASE("hybrid maps are total, deterministic and made of connected regions") {
  testing::RandomModelSpec spec;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto m = testing::random_model(seed, spec);
    const auto g = build_ghd(m, min_fill_order(m));
    const auto a = assign_strategies(g, m, Mode::Hybrid);
    REQUIRE(a.assignment.size() == g.size());
    CHECK(regions_connected(g, a));
    for (int rep = 0; rep < 4; ++rep) {
      const auto b = assign_strategies(g, m, Mode::Hybrid);
      CHECK(b.assignment == a.assignment);
      CHECK(b.region == a.region);
    }
    // Seeds come in decreasing truth-table order.
    for (std::size_t i = 1; i < a.seeds.size(); ++i)
      CHECK(a.seeds[i - 1].log10_truth_table >= a.seeds[i].log10_truth_table - 1e-12);
    // Every seed's own bag carries its decision.
    for (const auto& d : a.seeds) CHECK(a.assignment[d.bag] == d.decision);
  }
}
