#include <iostream>

#include "tsm/cli.hpp"

int main(int argc, char** argv) { return tsm::cli::run_cli(argc, argv, std::cout, std::cerr); }
