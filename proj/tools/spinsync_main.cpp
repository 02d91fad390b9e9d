#include "spinsync/cli.hpp"

int main(int argc, char** argv) {
  return spinsync::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
