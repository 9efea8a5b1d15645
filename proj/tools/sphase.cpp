#include <iostream>

#include "sphase_cli.hpp"

int main(int argc, char** argv) { return sphase::cli::run(argc, argv, std::cout, std::cerr); }
