#include <iostream>

#include "clines/cli.hpp"

int main(int argc, char** argv) { return clines::cli::run(argc, argv, std::cout, std::cerr); }
