#include <iostream>
#include <string>
#include <vector>

#include "qjm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return qjm::cli::run(args, std::cout, std::cerr);
}
