#include <iostream>

#include "jacobi_watson/cli.hpp"

int main(int argc, char** argv) { return jw::cli::run({argv + 1, argv + argc}, std::cout, std::cerr); }
