#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return d2gan::cli::run_cli(argc, argv, std::cout, std::cerr); }
