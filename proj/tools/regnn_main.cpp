#include <vector>

#include "regnn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return regnn::run_command(args);
}
