#include "sparsejt/uai.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "sparsejt/errors.hpp"

namespace sjt {

namespace {

class Tokens {
 public:
  explicit Tokens(std::string_view text) : text_(text) {}

  bool done() {
    skip();
    return pos_ == text_.size();
  }

  std::string_view next(const char* what) {
    skip();
    if (pos_ == text_.size()) throw ParseError(std::string("unexpected end of input, expected ") + what);
    const auto start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::uint64_t integer(const char* what, std::uint64_t max = std::numeric_limits<std::uint32_t>::max()) {
    const auto tok = next(what);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size())
      throw ParseError(std::string("expected ") + what + ", got '" + std::string(tok) + "'");
    if (v > max) throw ParseError(std::string(what) + " out of range: " + std::string(tok));
    return v;
  }

  double real(const char* what) {
    const auto tok = next(what);
    double v = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size() || !std::isfinite(v))
      throw ParseError(std::string("expected ") + what + ", got '" + std::string(tok) + "'");
    return v;
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
  void skip() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

}  // namespace

Model parse_uai(std::string_view text) {
  Tokens in(text);
  const auto preamble = in.next("MARKOV or BAYES");
  if (preamble != "MARKOV" && preamble != "BAYES")
    throw ParseError("unknown network type '" + std::string(preamble) + "'");

  const auto n = in.integer("variable count");
  std::vector<std::uint32_t> domains(n);
  for (auto& d : domains) {
    d = static_cast<std::uint32_t>(in.integer("domain size"));
    if (d == 0) throw ParseError("domain size must be positive");
  }

  const auto m = in.integer("factor count");
  std::vector<std::vector<VarId>> scopes(m);
  for (auto& scope : scopes) {
    const auto arity = in.integer("scope size", n);
    std::set<VarId> seen;
    for (std::uint64_t i = 0; i < arity; ++i) {
      const auto v = in.integer("variable id");
      if (v >= n) throw ParseError("variable id " + std::to_string(v) + " not below " + std::to_string(n));
      if (!seen.insert(static_cast<VarId>(v)).second)
        throw ParseError("variable " + std::to_string(v) + " repeated in a scope");
      scope.push_back(static_cast<VarId>(v));
    }
  }

  std::vector<FactorTable> factors;
  factors.reserve(m);
  for (std::uint64_t f = 0; f < m; ++f) {
    std::vector<std::uint32_t> cards;
    for (auto v : scopes[f]) cards.push_back(domains[v]);
    const auto expected = table_size_u64(cards);
    const auto count = in.integer("table entry count", std::numeric_limits<std::uint64_t>::max());
    if (!expected || count != *expected)
      throw ParseError("factor " + std::to_string(f) + " lists " + std::to_string(count) +
                       " entries, its scope needs " + (expected ? std::to_string(*expected) : "more than 2^64"));
    std::vector<double> values(count);
    for (auto& v : values) {
      v = in.real("table entry");
      if (v < 0.0) throw ParseError("negative table entry in factor " + std::to_string(f));
    }
    factors.push_back(FactorTable::from_dense(scopes[f], std::move(cards), values));
  }
  if (!in.done()) throw ParseError("trailing content after the last table");
  return Model(std::move(domains), std::move(factors));
}

std::string write_uai(const Model& model) {
  std::string out = "MARKOV\n" + std::to_string(model.num_variables()) + "\n";
  for (std::size_t i = 0; i < model.num_variables(); ++i) {
    if (i) out += ' ';
    out += std::to_string(model.domain_sizes()[i]);
  }
  out += "\n" + std::to_string(model.num_factors()) + "\n";
  for (const auto& f : model.factors()) {
    out += std::to_string(f.arity());
    for (auto v : f.scope()) out += " " + std::to_string(v);
    out += '\n';
  }
  for (const auto& f : model.factors()) {
    const auto size = table_size_u64(f.cards());
    if (!size) throw InvalidArgument("write_uai: factor truth table exceeds 64 bits");
    out += "\n" + std::to_string(*size) + "\n";
    // Stored rows are lexicographic, which is row-major order.
    std::vector<Value> t(f.arity(), 0);
    std::size_t next_row = 0;
    for (std::uint64_t cell = 0; cell < *size; ++cell) {
      double v = 0.0;
      if (next_row < f.size() && std::ranges::equal(f.tuple(next_row), t)) v = f.prob(next_row++);
      if (cell) out += ' ';
      append_double(out, v);
      for (std::size_t k = t.size(); k-- > 0;) {
        if (++t[k] < f.cards()[k]) break;
        t[k] = 0;
      }
    }
    out += '\n';
  }
  return out;
}

Evidence parse_evidence(std::string_view text, const Model& model) {
  Tokens in(text);
  const auto count = in.integer("evidence count");
  Evidence ev;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto v = in.integer("evidence variable");
    const auto x = in.integer("evidence value");
    if (v >= model.num_variables()) throw ParseError("evidence variable " + std::to_string(v) + " does not exist");
    if (x >= model.domain_size(static_cast<VarId>(v)))
      throw ParseError("evidence value " + std::to_string(x) + " out of range for variable " + std::to_string(v));
    if (!ev.emplace(static_cast<VarId>(v), static_cast<Value>(x)).second)
      throw ParseError("evidence variable " + std::to_string(v) + " given twice");
  }
  if (!in.done()) throw ParseError("trailing content after the evidence pairs");
  return ev;
}

std::string format_probability(double p) {
  char buf[64];
  if (p == 0.0) return "0.000000";
  if (p >= 1e-6) {
    const int digits = std::max(6, 5 - static_cast<int>(std::floor(std::log10(p))));
    std::snprintf(buf, sizeof buf, "%.*f", digits, p);
  } else {
    std::snprintf(buf, sizeof buf, "%.6e", p);
  }
  return buf;
}

std::string write_marginals(const MarginalSet& marginals) {
  std::string out = "MAR\n" + std::to_string(marginals.variables.size());
  for (const auto& dist : marginals.variables) {
    out += " " + std::to_string(dist.size());
    for (double p : dist) out += " " + format_probability(p);
  }
  out += '\n';
  return out;
}

}  // namespace sjt
