#include "sparsejt/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "sparsejt/engine.hpp"
#include "sparsejt/errors.hpp"
#include "sparsejt/oracle.hpp"
#include "sparsejt/uai.hpp"

namespace sjt {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw ParseError("cannot write " + path);
}

// Runs `body`, mapping library errors onto exit statuses.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InconsistentEvidence& e) {
    err << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const Timeout& e) {
    err << "error: " << e.what() << "\n";
    return kExitTimeout;
  } catch (const ResourceLimit& e) {
    err << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// CLI11 wants the arguments reversed.
int parse_args(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool& done) {
  std::vector<std::string> rev(args.rbegin(), args.rend());
  done = false;
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    done = true;
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int run_infer_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact marginal inference on a UAI network", "infer"};
  std::string network, evidence_path, out_path, mode_name = "multiway";
  bool stats = false, test_mode = false;
  std::optional<double> timeout;
  double tolerance = 1e-5;
  InferenceOptions opt;
  std::optional<std::size_t> root;
  app.add_option("network", network, "UAI network file")->required();
  app.add_option("--evidence", evidence_path, "UAI evidence file");
  app.add_option("--mode", mode_name, "multiway, multiway01, pairwise or hybrid")
      ->check(CLI::IsMember({"multiway", "multiway01", "pairwise", "hybrid"}));
  app.add_flag("--stats", stats, "print diagnostics to standard error");
  app.add_option("--timeout", timeout, "wall-clock limit in seconds")->check(CLI::PositiveNumber);
  app.add_option("--tolerance", tolerance, "max abs error for the brute-force check under --stats")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_path, "write marginals here instead of standard output");
  app.add_option("--hybrid-beta", opt.hybrid_beta, "pairwise if truth table <= beta * AGM bound")
      ->check(CLI::PositiveNumber);
  app.add_option("--hybrid-sigma", opt.hybrid_sigma, "projections if a projected support fraction is below sigma");
  app.add_option("--memory-cap", opt.memory_cap, "max dense table entries");
  app.add_option("--root", root, "root the decomposition at this bag");
  app.add_flag("--test-mode", test_mode, "run both kernels on every bag and compare them");

  bool done = false;
  const int status = parse_args(app, args, out, err, done);
  if (done) return status;

  return guarded(err, [&] {
    Model model = parse_uai(read_file(network));
    if (!evidence_path.empty()) model = model.with_evidence(parse_evidence(read_file(evidence_path), model));
    opt.mode = *parse_mode(mode_name);
    opt.timeout_seconds = timeout;
    opt.run_both_kernels = test_mode;
    opt.root = root;
    const auto res = infer(model, opt);
    const auto text = write_marginals(res.marginals);
    if (out_path.empty())
      out << text;
    else
      write_file(out_path, text);
    if (stats) {
      err << format_stats(res);
      try {
        const auto truth = brute_force_marginals(model);
        const auto rep = compare_marginals(res.marginals, truth, tolerance);
        err << "oracle max_abs_error " << rep.max_abs_error << " variable " << rep.worst_variable << " "
            << (rep.passed ? "pass" : "FAIL") << "\n";
      } catch (const ResourceLimit&) {
        err << "oracle skipped (joint too large)\n";
      }
    }
    return static_cast<int>(kExitOk);
  });
}

int run_sparsify_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomly drop factor entries of a UAI network", "sparsify"};
  std::string network, out_path;
  double keep = 1.0;
  std::uint64_t seed = 0;
  app.add_option("network", network, "UAI network file")->required();
  app.add_option("--keep", keep, "fraction of each factor's entries to keep")->required()->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", seed, "generator seed")->required();
  app.add_option("--out", out_path, "output UAI file")->required();

  bool done = false;
  const int status = parse_args(app, args, out, err, done);
  if (done) return status;

  return guarded(err, [&] {
    const Model model = parse_uai(read_file(network));
    const Model sparse = induce_sparsity(model, keep, seed);
    write_file(out_path, write_uai(sparse));
    std::vector<double> ratios;
    for (const auto& f : sparse.factors())
      if (f.arity() > 0) ratios.push_back(factor_sparsity(f));
    if (!ratios.empty()) {
      std::sort(ratios.begin(), ratios.end());
      double mean = 0.0;
      for (double r : ratios) mean += r;
      mean /= static_cast<double>(ratios.size());
      const std::size_t h = ratios.size() / 2;
      const double median = ratios.size() % 2 ? ratios[h] : 0.5 * (ratios[h - 1] + ratios[h]);
      out << "factors " << sparse.num_factors() << " sparsity median " << median * 100 << "% mean " << mean * 100
          << "%\n";
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace sjt
