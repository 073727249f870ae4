#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return colier::cli::run_cli(argc, argv, std::cout, std::cerr); }
