#include <iostream>

#include "qsir/cli.hpp"

int main(int argc, char** argv) { return qsir::cli::main(argc, argv, std::cout, std::cerr); }
