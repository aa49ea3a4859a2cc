#include <iostream>

#include "imdyn/tools/commands.hpp"

int main(int argc, char** argv) {
  return imdyn::tools::run_cli(argc, argv, std::cout, std::cerr);
}
