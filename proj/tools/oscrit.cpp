#include <iostream>

#include "oscrit/cli.hpp"

int main(int argc, char** argv) { return oscrit::cli::run(argc, argv, std::cout, std::cerr); }
