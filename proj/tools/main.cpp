#include <iostream>

#include "imexglm/cli.hpp"

int main(int argc, char** argv) {
  return imexglm::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
