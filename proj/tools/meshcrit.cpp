#include "meshcrit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return meshcrit::cli::run(argc, argv, std::cout, std::cerr); }
