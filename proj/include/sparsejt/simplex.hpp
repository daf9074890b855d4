#pragma once

#include <vector>

namespace sjt {

struct LpSolution {
  std::vector<double> primal;  // one value per column
  std::vector<double> dual;    // one price per row
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// Dense tableau simplex for
///     maximize c.y  subject to  A y <= b,  y >= 0
/// with b >= 0, so the slack basis is feasible and no phase one is needed.
/// Bland's rule (lowest index enters, lowest basis index leaves on ratio
/// ties) guarantees termination on degenerate problems. Throws
/// InfeasibleCover if the problem is unbounded.
LpSolution maximize_packing(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                            const std::vector<double>& c);

}  // namespace sjt
