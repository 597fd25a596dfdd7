#include <iostream>
#include <string>
#include <vector>

#include "ordlab/lab.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ordlab::run_cli(args, std::cout, std::cerr);
}
