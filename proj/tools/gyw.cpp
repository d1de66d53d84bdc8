#include <iostream>

#include "gyw/cli.hpp"

int main(int argc, char** argv) { return gyw::cli::run(argc, argv, std::cout, std::cerr); }
