#include <iostream>

#include <stdissim/cli.hpp>

int main(int argc, char** argv) { return stdissim::cli::run(argc, argv, std::cout, std::cerr); }
