#include <iostream>

#include "bike/cli.hpp"

int main(int argc, char** argv) {
  return bike::run_cli(argc, argv, std::cout, std::cerr);
}
