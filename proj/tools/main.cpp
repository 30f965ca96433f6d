#include <iostream>
#include <string>
#include <vector>

#include "quantband/cli.hpp"

int main(int argc, char** argv) {
  return quantband::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
