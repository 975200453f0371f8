#include <iostream>

#include "rlwe_lab/cli.hpp"

int main(int argc, char** argv) { return rlwe_lab::cli::run(argc, argv, std::cout, std::cerr); }
