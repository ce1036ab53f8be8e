#include <iostream>

#include "ehrelay/io/cli.hpp"

int main(int argc, char** argv) { return ehrelay::io::main_entry(argc, argv, std::cout, std::cerr); }
