#include <iostream>

#include "numidx/cli.hpp"

int main(int argc, char** argv) { return numidx::run_cli(argc, argv, std::cout, std::cerr); }
