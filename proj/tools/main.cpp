#include <iostream>

#include "intent_orch/cli.hpp"

int main(int argc, char** argv) {
  return intent_orch::cli::main(argc, argv, std::cout, std::cerr);
}
