#include "tra/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tra::cli::main_entry(argc, argv, std::cout, std::cerr); }
