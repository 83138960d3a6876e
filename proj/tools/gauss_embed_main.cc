#include <iostream>

#include "gauss_embed/cli.h"

int main(int argc, char** argv) { return gauss_embed::run_cli(argc, argv, std::cout, std::cerr); }
