#include "ltp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ltp::cli::run_cli(argc, argv, std::cout, std::cerr); }
