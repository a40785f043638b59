#include <iostream>
#include <string>
#include <vector>

#include "simrt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return simrt::cli::run(args, std::cout, std::cerr);
}
