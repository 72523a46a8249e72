#include <iostream>

#include "gpr/commands.hpp"

int main(int argc, char** argv) { return gpr::run_cli(argc, argv, std::cout, std::cerr); }
