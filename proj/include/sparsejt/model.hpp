#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace sjt {

using VarId = std::uint32_t;
using Value = std::uint32_t;
using Evidence = std::map<VarId, Value>;

struct Variable {
  VarId id = 0;
  std::uint32_t domain_size = 1;
};

/// Tag for the FactorTable constructor that trusts its input to be canonical
/// already (ascending scope, lexicographically sorted rows, no zeros).
struct CanonicalRows {};

/// Listing representation of a factor: only tuples with non-zero probability
/// are stored. The scope is kept in ascending variable order and rows are kept
/// sorted lexicographically, so two tables with the same content compare equal.
class FactorTable {
 public:
  FactorTable() = default;

  /// `tuples` holds one row per entry of `probs`, components in the order of
  /// `scope`. Zero entries are dropped; the scope is re-sorted.
  FactorTable(std::vector<VarId> scope, std::vector<std::uint32_t> cards,
              std::vector<Value> tuples, std::vector<double> probs);

  FactorTable(CanonicalRows, std::vector<VarId> scope, std::vector<std::uint32_t> cards,
              std::vector<Value> tuples, std::vector<double> probs);

  /// Row-major dense table over `scope` as written, last variable fastest.
  static FactorTable from_dense(std::vector<VarId> scope, std::vector<std::uint32_t> cards,
                                std::span<const double> values);

  /// Every tuple of the full truth table, probability 1.
  static FactorTable unit(std::vector<VarId> scope, std::vector<std::uint32_t> cards);

  const std::vector<VarId>& scope() const { return scope_; }
  const std::vector<std::uint32_t>& cards() const { return cards_; }
  std::size_t arity() const { return scope_.size(); }
  std::size_t size() const { return probs_.size(); }
  bool empty() const { return probs_.empty(); }

  std::span<const Value> tuple(std::size_t row) const {
    return {tuples_.data() + row * scope_.size(), scope_.size()};
  }
  double prob(std::size_t row) const { return probs_[row]; }
  std::span<const Value> flat_tuples() const { return tuples_; }
  std::span<const double> probs() const { return probs_; }

  /// Position of `var` in the scope, if present.
  std::optional<std::size_t> position(VarId var) const;
  bool contains(VarId var) const { return position(var).has_value(); }

  /// Row index of `t` (components in scope order), if stored.
  std::optional<std::size_t> find(std::span<const Value> t) const;

  double total_mass() const;

  /// In-place row scaling for calibration. Call drop_zero_rows() afterwards
  /// if any probability may have become zero.
  std::span<double> mutable_probs() { return probs_; }
  void drop_zero_rows();

  bool operator==(const FactorTable&) const = default;

 private:
  void validate() const;

  std::vector<VarId> scope_;
  std::vector<std::uint32_t> cards_;
  std::vector<Value> tuples_;
  std::vector<double> probs_;
};

/// Exact truth-table size when it fits into 64 bits.
std::optional<std::uint64_t> table_size_u64(std::span<const std::uint32_t> cards);
double log10_table_size(std::span<const std::uint32_t> cards);

/// N / prod |D(U)| over the scope. The denominator is exact in 128 bits and
/// falls back to log space beyond that.
double factor_sparsity(const FactorTable& factor, std::span<const std::uint32_t> domains);
double factor_sparsity(const FactorTable& factor);

/// A discrete PGM: variables 0..n-1 with their domain sizes, factors, and a
/// partial assignment. `log_constant` carries scalar weights already folded
/// out of the factor list (natural log).
class Model {
 public:
  Model() = default;
  Model(std::vector<std::uint32_t> domain_sizes, std::vector<FactorTable> factors,
        Evidence evidence = {}, double log_constant = 0.0);

  std::size_t num_variables() const { return domains_.size(); }
  std::size_t num_factors() const { return factors_.size(); }
  const std::vector<std::uint32_t>& domain_sizes() const { return domains_; }
  std::uint32_t domain_size(VarId v) const { return domains_.at(v); }
  std::vector<Variable> variables() const;
  const std::vector<FactorTable>& factors() const { return factors_; }
  const FactorTable& factor(std::size_t i) const { return factors_.at(i); }
  const Evidence& evidence() const { return evidence_; }
  double log_constant() const { return log_constant_; }

  Model with_evidence(Evidence evidence) const;
  Model with_factors(std::vector<FactorTable> factors) const;

  bool operator==(const Model&) const = default;

 private:
  std::vector<std::uint32_t> domains_;
  std::vector<FactorTable> factors_;
  Evidence evidence_;
  double log_constant_ = 0.0;
};

void validate_evidence(const Model& model, const Evidence& evidence);

/// Result of slicing a model by its evidence. The reduced model has no
/// evidence and only the free variables, renumbered densely.
struct ConditionedModel {
  Model model;
  std::vector<VarId> original_var;                  // reduced id -> original id
  std::vector<std::optional<VarId>> reduced_var;    // original id -> reduced id
  std::vector<std::optional<std::size_t>> reduced_factor;  // original factor -> reduced
  Evidence evidence;                                // in original ids
  std::size_t original_num_vars = 0;
};

ConditionedModel condition_on_evidence(const Model& model);

}  // namespace sjt
