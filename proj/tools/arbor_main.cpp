#include <iostream>
#include <string>
#include <vector>

#include "arbor/cli/commands.hpp"

int main(int argc, char** argv) {
  return arbor::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
