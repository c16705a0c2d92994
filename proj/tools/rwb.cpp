#include "rwb/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return rwb::run_cli(argc, argv, std::cout, std::cerr); }
