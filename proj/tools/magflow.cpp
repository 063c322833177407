#include <iostream>

#include "magflow/cli.hpp"

int main(int argc, char** argv) { return magflow::cli::run(argc, argv, std::cout, std::cerr); }
