#pragma once

#include <vector>

#include "sparsejt/model.hpp"

namespace sjt {

/// Normalized variable and factor marginals plus log Z.
struct MarginalSet {
  std::vector<std::vector<double>> variables;  // per variable, distribution over its domain
  std::vector<FactorTable> factors;            // per input factor, normalized over its scope
  double log_partition = 0.0;                  // natural log of Z
};

}  // namespace sjt
