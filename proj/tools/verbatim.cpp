#include <iostream>
#include <string>
#include <vector>

#include "verbatim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return verbatim::cli::run(args, {std::cin, std::cout, std::cerr});
}
