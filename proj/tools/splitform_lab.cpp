#include <iostream>

#include "splitform/cli.hpp"
#include "splitform/openblas_env.hpp"

int main(int argc, char** argv) {
  splitform::ensure_openblas_coretype(argv);
  return splitform::cli::run(argc, argv, std::cout, std::cerr);
}
