#include <iostream>
#include <string>
#include <vector>

#include "vesselfuse/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return vesselfuse::cli_main(args, std::cout, std::cerr);
}
