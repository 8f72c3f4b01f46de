#include <iostream>
#include <string>
#include <vector>

#include "ctaudit/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return ctaudit::run_cli(args, std::cout, std::cerr);
}
