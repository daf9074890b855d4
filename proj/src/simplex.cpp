#include "sparsejt/simplex.hpp"

#include <cmath>
#include <limits>

#include "sparsejt/errors.hpp"

namespace sjt {

namespace {
constexpr double kEps = 1e-12;
}

LpSolution maximize_packing(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                            const std::vector<double>& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw InvalidArgument("simplex: row count mismatch");
  for (const auto& row : a)
    if (row.size() != n) throw InvalidArgument("simplex: column count mismatch");
  for (auto bi : b)
    if (bi < 0.0) throw InvalidArgument("simplex: negative right-hand side");

  // Tableau columns: n structural, m slack, 1 rhs.
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m, std::vector<double>(width, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][width - 1] = b[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
  auto cost = [&](std::size_t j) { return j < n ? c[j] : 0.0; };

  LpSolution sol;
  for (;;) {
    // Reduced cost of column j: c_j - c_B . column_j.
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      double rc = cost(j);
      for (std::size_t i = 0; i < m; ++i) rc -= cost(basis[i]) * t[i][j];
      if (rc > kEps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= kEps) continue;
      const double ratio = t[i][width - 1] / t[i][enter];
      if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && leave < m && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) throw InfeasibleCover("simplex: objective unbounded");

    const double pivot = t[leave][enter];
    for (auto& x : t[leave]) x /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
    ++sol.pivots;
  }

  sol.primal.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) sol.primal[basis[i]] = t[i][width - 1];
  // Slack columns hold B^-1, so the row prices are c_B B^-1.
  sol.dual.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i) sol.dual[k] += cost(basis[i]) * t[i][n + k];
  for (std::size_t j = 0; j < n; ++j) sol.objective += c[j] * sol.primal[j];
  return sol;
}

}  // namespace sjt
