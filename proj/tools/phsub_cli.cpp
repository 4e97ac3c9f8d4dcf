#include <iostream>

#include "phsub/runner.hpp"

int main(int argc, char** argv) { return phsub::cli::run_cli(argc, argv, std::cout, std::cerr); }
