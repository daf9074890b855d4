#pragma once

#include <string>
#include <string_view>

#include "sparsejt/marginals.hpp"
#include "sparsejt/model.hpp"

namespace sjt {

/// UAI network text (MARKOV or BAYES; both load as plain factor sets).
/// Tables are row-major over the scope as written, last variable fastest;
/// zero entries are dropped. Throws ParseError.
Model parse_uai(std::string_view text);

/// MARKOV text for the model's factors: ascending scopes, full tables,
/// shortest round-trip decimal values. Evidence and the folded constant are
/// not part of the format.
std::string write_uai(const Model& model);

/// UAI evidence text: a count followed by (variable, value) pairs. Checked
/// against the model's variables and domains. Throws ParseError.
Evidence parse_evidence(std::string_view text, const Model& model);

/// MAR text: "MAR", then the variable count and, per variable, its domain
/// size followed by its distribution.
std::string write_marginals(const MarginalSet& marginals);

/// One probability as write_marginals prints it.
std::string format_probability(double p);

}  // namespace sjt
