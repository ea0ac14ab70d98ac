#include <iostream>

#include "helmmg/cli.hpp"

int main(int argc, char** argv) {
  return helmmg::run_cli(argc, argv, std::cout, std::cerr);
}
