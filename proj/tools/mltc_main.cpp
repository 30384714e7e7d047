#include <iostream>

#include "mltc/cli.hpp"

int main(int argc, char** argv) { return mltc::cli::run(argc, argv, std::cout, std::cerr); }
