#include "proxident/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return proxident::run_cli(argc, argv, std::cout, std::cerr); }
