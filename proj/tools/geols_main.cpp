#include <iostream>
#include <string>
#include <vector>

#include "geols/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return geols::run_cli(args, std::cout, std::cerr);
}
