#include <iostream>
#include <string>
#include <vector>

#include "moranq_cli/app.hpp"

int main(int argc, char** argv) {
  return moranq::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
