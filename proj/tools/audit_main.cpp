#include <iostream>
#include <string>
#include <vector>

#include "protaudit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return protaudit::RunCli(args, std::cout, std::cerr);
}
