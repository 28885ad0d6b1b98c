#include <iostream>
#include <string>
#include <vector>

#include "ctgn/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv, argv + argc);
  return ctgn::run_cli(args, std::cin, std::cout, std::cerr);
}
