#include "fracexp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fracexp::run_cli(argc, argv, std::cout, std::cerr); }
