#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return hyca::cli::run(argc, argv, std::cout, std::cerr); }
