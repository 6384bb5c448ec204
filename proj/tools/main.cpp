#include <iostream>

#include "hornlab/run.hpp"

int main(int argc, char** argv) { return hornlab::run_cli(argc, argv, std::cout, std::cerr); }
