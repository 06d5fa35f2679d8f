#include <iostream>

#include "kerrsim_cli/cli.hpp"

int main(int argc, char** argv) { return kerrsim::cli::main_entry(argc, argv, std::cout, std::cerr); }
