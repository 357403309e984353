#include <iostream>

#include "rlab/cli/experiments.hpp"

int main(int argc, char** argv) { return rlab::cli::main_entry(argc, argv, std::cout, std::cerr); }
