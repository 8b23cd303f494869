#include <iostream>
#include <string>
#include <vector>

#include "radbif/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return radbif::run_cli(args, std::cout, std::cerr);
}
