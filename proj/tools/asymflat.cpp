#include <iostream>

#include "asymflat/cli.hpp"

int main(int argc, char** argv) { return asymflat::run_cli(argc, argv, std::cout, std::cerr); }
