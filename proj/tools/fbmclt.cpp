#include <iostream>
#include <string>
#include <vector>

#include "fbmclt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fbmclt::run_cli(args, std::cout, std::cerr);
}
