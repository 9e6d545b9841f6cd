#include <iostream>
#include <string>
#include <vector>

#include "nvgeo/cli.hpp"

int main(int argc, char** argv) {
  return nvgeo::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
