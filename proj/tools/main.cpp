#include <iostream>
#include <string>
#include <vector>

#include "cmc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cmc::cli::run(args, std::cout, std::cerr);
}
