#include <iostream>

#include "momlasso/bench/cli.hpp"

int main(int argc, char** argv) { return momlasso::bench::run_cli(argc, argv, std::cout, std::cerr); }
