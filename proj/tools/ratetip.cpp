#include <iostream>
#include <string>
#include <vector>

#include "ratetip/commands.hpp"

int main(int argc, char** argv) {
  return ratetip::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
