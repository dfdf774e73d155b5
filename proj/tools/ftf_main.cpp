#include <string>
#include <vector>

#include "ftf/cli_app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ftf::run_cli(args);
}
