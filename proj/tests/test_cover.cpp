#include <doctest.h>

#include <cmath>
#include <limits>

#include "sparsejt/cover.hpp"
#include "sparsejt/engine.hpp"
#include "sparsejt/errors.hpp"
#include "sparsejt/simplex.hpp"
#include "support/lp_oracle.hpp"
#include "support/random_models.hpp"

using namespace sjt;

TEST_CASE("triangle cover is one half per edge") {
  const double n = 1000;
  const std::vector<VarId> bag{0, 1, 2};
  const auto s = solve_fractional_cover(
      bag, {CoverEdge::sized({0, 1}, n), CoverEdge::sized({1, 2}, n), CoverEdge::sized({0, 2}, n)});
  for (double w : s.weights) CHECK(std::abs(w - 0.5) <= 1e-9);
  CHECK(std::abs(s.log2_bound - 1.5 * std::log2(n)) <= 1e-9);
  CHECK(std::abs(s.cover_number - 1.5) <= 1e-9);
  CHECK(s.max_violation() <= 1e-9);
}

TEST_CASE("single edge and two-edge path covers") {
  const std::vector<VarId> ab{0, 1};
  const auto one = solve_fractional_cover(ab, {CoverEdge::sized({0, 1}, 50)});
  CHECK(one.weights[0] == doctest::Approx(1.0));
  CHECK(one.log2_bound == doctest::Approx(std::log2(50.0)));

  const std::vector<VarId> abc{0, 1, 2};
  const auto two = solve_fractional_cover(abc, {CoverEdge::sized({0, 1}, 50), CoverEdge::sized({1, 2}, 50)});
  CHECK(two.weights[0] == doctest::Approx(1.0));
  CHECK(two.weights[1] == doctest::Approx(1.0));
  CHECK(two.log2_bound == doctest::Approx(2 * std::log2(50.0)));
  // Vertex enumeration agrees.
  const auto v = testing::enumerate_cover_vertices(abc, two.edges);
  CHECK(v.objective == doctest::Approx(two.log2_bound));
}

TEST_CASE("uncoverable variables and empty edges") {
  const std::vector<VarId> abc{0, 1, 2};
  CHECK_THROWS_AS(solve_fractional_cover(abc, {CoverEdge::sized({0, 1}, 4)}), InfeasibleCover);
  const auto s = solve_fractional_cover(abc, {CoverEdge::sized({0, 1, 2}, 8), CoverEdge::sized({1}, 0)});
  CHECK(s.log2_bound == -std::numeric_limits<double>::infinity());
  CHECK(s.max_violation() <= 1e-9);
}

TEST_CASE("edges outside the bag get no weight") {
  const std::vector<VarId> ab{0, 1};
  const auto s = solve_fractional_cover(ab, {CoverEdge::sized({0, 1}, 9), CoverEdge::sized({5, 6}, 2)});
  CHECK(s.weights[1] == 0.0);
}

TEST_CASE("simplex matches vertex enumeration on random small LPs") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 500; ++round) {
    const auto nv = static_cast<std::size_t>(testing::pick(rng, 1, 3));
    std::vector<VarId> bag(nv);
    for (std::size_t i = 0; i < nv; ++i) bag[i] = static_cast<VarId>(i);
    const auto ne = static_cast<std::size_t>(testing::pick(rng, 1, 6));
    std::vector<CoverEdge> edges;
    for (std::size_t e = 0; e < ne; ++e) {
      std::vector<VarId> scope;
      for (VarId x = 0; x < nv; ++x)
        if (testing::unit_real(rng) < 0.5) scope.push_back(x);
      if (scope.empty()) scope.push_back(static_cast<VarId>(testing::pick(rng, 0, nv - 1)));
      edges.push_back(CoverEdge::sized(scope, static_cast<double>(testing::pick(rng, 1, 500))));
    }
    for (VarId x = 0; x < nv; ++x) edges.push_back(CoverEdge::sized({x}, static_cast<double>(testing::pick(rng, 1, 50))));
    const auto s = solve_fractional_cover(bag, edges);
    const auto v = testing::enumerate_cover_vertices(bag, edges);
    CHECK(s.log2_bound == doctest::Approx(v.objective).epsilon(1e-9));
    CHECK(s.max_violation() <= 1e-9);
    for (double w : s.weights) CHECK((w >= 0.0 && w <= 1.0));

    // Duplicating an edge never raises the optimum.
    auto dup = edges;
    dup.push_back(edges[static_cast<std::size_t>(testing::pick(rng, 0, edges.size() - 1))]);
    CHECK(solve_fractional_cover(bag, dup).log2_bound <= s.log2_bound + 1e-9);

    const auto u = solve_unit_cover(bag, edges);
    const auto uv = testing::enumerate_cover_vertices(bag, edges, true);
    CHECK(u.cover_number == doctest::Approx(uv.objective).epsilon(1e-9));
  }
}

TEST_CASE("simplex handles a degenerate packing problem") {
  // Many parallel rows through one vertex.
  std::vector<std::vector<double>> a{{1, 1}, {1, 1}, {1, 0}, {0, 1}, {1, 1}};
  std::vector<double> b{1, 1, 1, 1, 1};
  const auto lp = maximize_packing(a, b, {1, 1});
  CHECK(lp.objective == doctest::Approx(1.0));
  CHECK_THROWS_AS(maximize_packing({{1, 0}}, {1}, {1, 1}), InfeasibleCover);
}

TEST_CASE("fhtw, R_D and R_J on small networks") {
  const double full[] = {1, 1, 1, 1};
  Model tri({2, 2, 2}, {FactorTable::from_dense({0, 1}, {2, 2}, full), FactorTable::from_dense({1, 2}, {2, 2}, full),
                        FactorTable::from_dense({0, 2}, {2, 2}, full)});
  const auto g = build_ghd(tri, min_fill_order(tri));
  CHECK(std::abs(fhtw(g, tri) - 1.5) <= 1e-9);
  const auto p = predictors(g, tri);
  CHECK(p.tw == 3);
  CHECK(std::abs(p.log10_rd) <= 1e-12);  // (D^2)^1.5 / D^3

  // One bag, one factor: R_J = N / P.
  std::vector<double> sparse(12, 0.0);
  sparse[0] = sparse[5] = sparse[11] = 1.0;
  Model one({3, 4}, {FactorTable::from_dense({0, 1}, {3, 4}, sparse)});
  const auto g1 = build_ghd(one, min_fill_order(one));
  const auto p1 = predictors(g1, one);
  CHECK(p1.log10_rj == doctest::Approx(std::log10(3.0 / 12.0)));
  CHECK(fhtw(g1, one) == doctest::Approx(1.0));
}

TEST_CASE("R_D formula value for N=387, fhtw=4, D=44, tw=8") {
  const double expected = 4 * std::log10(387.0) - 8 * std::log10(44.0);
  CHECK(std::abs(log10_rd(387, 4, 44, 8) - expected) <= 1e-12);
  CHECK(std::abs(expected + 2.7968) <= 1e-4);
}

TEST_CASE("random decompositions: feasibility and fhtw <= tw") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = infer(testing::random_model(seed));
    const auto p = predictors(r.ghd, r.working);
    CHECK(p.fhtw <= static_cast<double>(p.tw) + 1e-9);
    for (const auto& c : p.bag_covers) {
      CHECK(c.max_violation() <= 1e-9);
      if (c.bag_vars.size() <= 3) {
        const auto v = testing::enumerate_cover_vertices(c.bag_vars, c.edges);
        CHECK(c.log2_bound == doctest::Approx(v.objective).epsilon(1e-9));
      }
    }
  }
}
