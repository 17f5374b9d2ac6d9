#include <iostream>
#include <string>
#include <vector>

#include "pfp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pfp::cli::run(args, std::cout, std::cerr);
}
