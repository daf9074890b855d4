#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsejt/engine.hpp"
#include "sparsejt/errors.hpp"
#include "sparsejt/oracle.hpp"
#include "sparsejt/uai.hpp"

namespace py = pybind11;
using namespace sjt;

namespace {

py::dict to_dict(const MarginalSet& m) {
  py::list factors;
  for (const auto& f : m.factors) {
    py::dict rows;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto t = f.tuple(i);
      rows[py::tuple(py::cast(std::vector<Value>(t.begin(), t.end())))] = f.prob(i);
    }
    factors.append(py::make_tuple(f.scope(), rows));
  }
  py::dict out;
  out["variables"] = m.variables;
  out["factors"] = factors;
  out["log_partition"] = m.log_partition;
  return out;
}

Model load(const std::string& network, const std::string& evidence) {
  Model m = parse_uai(network);
  if (!evidence.empty()) m = m.with_evidence(parse_evidence(evidence, m));
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact marginal inference over sparse factor tables";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<InconsistentEvidence>(m, "InconsistentEvidence", base.ptr());
  py::register_exception<ResourceLimit>(m, "ResourceLimit", base.ptr());
  py::register_exception<Timeout>(m, "Timeout", base.ptr());

  m.def(
      "infer",
      [](const std::string& network, const std::string& evidence, const std::string& mode, double beta, double sigma,
         std::uint64_t memory_cap, std::optional<double> timeout) {
        const auto parsed = parse_mode(mode);
        if (!parsed) throw InvalidArgument("unknown mode '" + mode + "'");
        InferenceOptions o;
        o.mode = *parsed;
        o.hybrid_beta = beta;
        o.hybrid_sigma = sigma;
        o.memory_cap = memory_cap;
        o.timeout_seconds = timeout;
        const auto model = load(network, evidence);
        const auto r = infer(model, o);
        auto d = to_dict(r.marginals);
        d["stats"] = format_stats(r);
        return d;
      },
      py::arg("network"), py::arg("evidence") = "", py::arg("mode") = "multiway", py::arg("hybrid_beta") = 1.0,
      py::arg("hybrid_sigma") = 0.9, py::arg("memory_cap") = kDefaultMemoryCap, py::arg("timeout") = py::none(),
      "Marginals and log Z of a UAI network given as text.");

  m.def(
      "brute_force",
      [](const std::string& network, const std::string& evidence) { return to_dict(brute_force_marginals(load(network, evidence))); },
      py::arg("network"), py::arg("evidence") = "", "Marginals by full enumeration (small networks only).");

  m.def(
      "sparsify",
      [](const std::string& network, double keep, std::uint64_t seed) {
        return write_uai(induce_sparsity(parse_uai(network), keep, seed));
      },
      py::arg("network"), py::arg("keep"), py::arg("seed") = 0, "Keep a random share of every factor's entries.");

  m.def(
      "normalize_uai", [](const std::string& network) { return write_uai(parse_uai(network)); }, py::arg("network"),
      "Parse and re-emit a network in canonical MARKOV form.");

  m.def(
      "marginals_text",
      [](const std::string& network, const std::string& evidence, const std::string& mode) {
        InferenceOptions o;
        const auto parsed = parse_mode(mode);
        if (!parsed) throw InvalidArgument("unknown mode '" + mode + "'");
        o.mode = *parsed;
        return write_marginals(infer(load(network, evidence), o).marginals);
      },
      py::arg("network"), py::arg("evidence") = "", py::arg("mode") = "multiway", "MAR text, as the CLI prints it.");
}
