#include <iostream>

#include "ctxgram/cli.hpp"

int main(int argc, char** argv) {
  return ctxgram::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
