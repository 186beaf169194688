#include <iostream>
#include <string>
#include <vector>

#include "freeze/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return freeze::run_cli(args, std::cout, std::cerr);
}
