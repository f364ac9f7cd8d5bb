#include <iostream>

#include "polyball/cli.hpp"

int main(int argc, char** argv) {
  return polyball::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
