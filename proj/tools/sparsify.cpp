#include <iostream>

#include "sparsejt/cli.hpp"

int main(int argc, char** argv) {
  return sjt::run_sparsify_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
