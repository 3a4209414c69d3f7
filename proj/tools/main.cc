#include <iostream>

#include "cli.h"

int main(int argc, char **argv) {
  return evidencer::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
