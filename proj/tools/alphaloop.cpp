#include <iostream>
#include <string>
#include <vector>

#include "alphaloop/io/cli.hpp"

int main(int argc, char** argv) {
  return alphaloop::io::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
