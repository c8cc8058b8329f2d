#include <bezlane/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return bezlane::cli::main(argc, argv, std::cout, std::cerr); }
