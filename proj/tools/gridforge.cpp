#include <iostream>

#include "gridforge/cli.hpp"

int main(int argc, char** argv) { return gridforge::run_cli(argc, argv, std::cout, std::cerr); }
