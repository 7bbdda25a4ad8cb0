#include <iostream>

#include "dce_sphere/cli.hpp"

int main(int argc, char** argv) { return dce::cli::run(argc, argv, std::cout, std::cerr); }
