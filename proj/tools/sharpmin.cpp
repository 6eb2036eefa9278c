#include <iostream>

#include "sharpmin/cli.hpp"

int main(int argc, char** argv) { return sharpmin::cli::run(argc, argv, std::cout, std::cerr); }
