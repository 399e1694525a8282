#include <iostream>

#include "hjdebt/cli.hpp"

int main(int argc, char** argv) { return hjdebt::run_cli(argc, argv, std::cout, std::cerr); }
