#include <iostream>

#include "smartbeta/cli.hpp"

int main(int argc, char** argv) { return smartbeta::cli::run(argc, argv, std::cout, std::cerr); }
