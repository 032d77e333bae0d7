#include <iostream>

#include "refmon_cli/cli.hpp"

int main(int argc, char** argv) { return refmon::cli::run(argc, argv, std::cout, std::cerr); }
