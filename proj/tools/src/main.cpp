#include <iostream>

#include "pfrl_cli/cli.hpp"

int main(int argc, char** argv) {
  return pfrl::cli::run(argc, argv, std::cout, std::cerr);
}
