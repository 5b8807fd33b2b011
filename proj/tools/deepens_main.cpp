#include <iostream>

#include "deepens/cli.hpp"

int main(int argc, char** argv) { return deepens::cli_dispatch(argc, argv, std::cout, std::cerr); }
