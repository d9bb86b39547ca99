#include <iostream>

#include "walras/cli.hpp"

int main(int argc, char** argv) { return walras::cli::run(argc, argv, std::cout, std::cerr); }
