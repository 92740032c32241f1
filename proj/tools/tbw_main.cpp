#include <iostream>

#include "tbw/cli/commands.hpp"

int main(int argc, char** argv) { return tbw::cli::run_cli(argc, argv, std::cout, std::cerr); }
