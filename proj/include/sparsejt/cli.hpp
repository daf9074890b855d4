#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sjt {

enum ExitStatus : int {
  kExitOk = 0,
  kExitUsage = 1,  // bad arguments, unreadable or malformed input
  kExitInconsistent = 2,
  kExitTimeout = 3,
  kExitResource = 4,
};

/// `infer <network.uai> [options]`; args exclude the program name.
int run_infer_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// `sparsify <network.uai> --keep f --seed s --out file`.
int run_sparsify_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sjt
