#include <iostream>
#include <string>
#include <vector>

#include "qlocc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qlocc::run(args, std::cout, std::cerr);
}
