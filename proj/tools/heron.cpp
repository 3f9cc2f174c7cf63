#include <iostream>

#include "heron/cli.hpp"

int main(int argc, char** argv) { return heron::cli::run_cli(argc, argv, std::cout, std::cerr); }
