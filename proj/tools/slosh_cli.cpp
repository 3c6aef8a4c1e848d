#include <iostream>

#include "slosh/cli.hpp"

int main(int argc, char** argv) { return slosh::run_cli(argc, argv, std::cout, std::cerr); }
