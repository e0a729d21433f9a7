#include <iostream>

#include "onlinefwer/cli.hpp"

int main(int argc, char** argv) { return ofwer::run_cli(argc, argv, std::cout, std::cerr); }
