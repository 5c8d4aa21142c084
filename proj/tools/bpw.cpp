#include <iostream>

#include "bpw/cli.hpp"

int main(int argc, char** argv) { return bpw::cli::run_cli(argc, argv, std::cout, std::cerr); }
