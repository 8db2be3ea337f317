#include <iostream>

#include "agg/cli.hpp"

int main(int argc, char** argv) { return agg::run_cli(argc, argv, std::cout, std::cerr); }
