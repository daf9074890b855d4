#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sparsejt/cover.hpp"

namespace sjt::testing {

struct VertexOptimum {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

/// Solves the cover LP (min c.x, sum over edges holding v of x_e >= 1, x >= 0)
/// by trying every choice of k tight constraints out of the m cover rows and
/// the k bounds x_e >= 0, where k is the number of edges. The polyhedron has
/// no lines, so the optimum sits at one of these vertices.
inline VertexOptimum enumerate_cover_vertices(std::span<const VarId> bag, const std::vector<CoverEdge>& edges,
                                              bool unit = false) {
  const std::size_t k = edges.size(), m = bag.size();
  std::vector<std::vector<double>> rows;  // rows . x >= rhs
  std::vector<double> rhs;
  for (auto v : bag) {
    std::vector<double> r(k, 0.0);
    for (std::size_t e = 0; e < k; ++e)
      if (std::find(edges[e].scope.begin(), edges[e].scope.end(), v) != edges[e].scope.end()) r[e] = 1.0;
    rows.push_back(r);
    rhs.push_back(1.0);
  }
  for (std::size_t e = 0; e < k; ++e) {
    std::vector<double> r(k, 0.0);
    r[e] = 1.0;
    rows.push_back(r);
    rhs.push_back(0.0);
  }
  std::vector<double> cost(k);
  for (std::size_t e = 0; e < k; ++e) cost[e] = unit ? 1.0 : std::max(edges[e].log2_size, 0.0);

  VertexOptimum best;
  const std::size_t total = m + k;
  std::vector<int> choose(total, 0);
  std::fill(choose.end() - static_cast<std::ptrdiff_t>(k), choose.end(), 1);
  do {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < total; ++i)
      if (choose[i]) {
        a.push_back(rows[i]);
        b.push_back(rhs[i]);
      }
    // Gaussian elimination with partial pivoting.
    bool singular = false;
    for (std::size_t c = 0; c < k && !singular; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < k; ++r)
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      if (std::abs(a[piv][c]) < 1e-12) {
        singular = true;
        break;
      }
      std::swap(a[c], a[piv]);
      std::swap(b[c], b[piv]);
      for (std::size_t r = 0; r < k; ++r) {
        if (r == c) continue;
        const double f = a[r][c] / a[c][c];
        for (std::size_t j = c; j < k; ++j) a[r][j] -= f * a[c][j];
        b[r] -= f * b[c];
      }
    }
    if (singular) continue;
    std::vector<double> x(k);
    for (std::size_t c = 0; c < k; ++c) x[c] = b[c] / a[c][c];
    bool feasible = true;
    for (std::size_t i = 0; i < total && feasible; ++i) {
      double s = 0.0;
      for (std::size_t e = 0; e < k; ++e) s += rows[i][e] * x[e];
      feasible = s >= rhs[i] - 1e-9;
    }
    if (!feasible) continue;
    double obj = 0.0;
    for (std::size_t e = 0; e < k; ++e) obj += cost[e] * x[e];
    if (obj < best.objective) {
      best.objective = obj;
      best.x = x;
    }
  } while (std::next_permutation(choose.begin(), choose.end()));
  return best;
}

}  // namespace sjt::testing
