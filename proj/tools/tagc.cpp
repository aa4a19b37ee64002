#include <iostream>

#include "tagc/cli.hpp"

int main(int argc, char** argv) { return tagc::run_cli(argc, argv, std::cout, std::cerr); }
