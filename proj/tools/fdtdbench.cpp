#include <iostream>

#include "fdtdbench/cli.hpp"

int main(int argc, char** argv)
{
    return fdtdbench::run_cli(argc, argv, std::cout, std::cerr);
}
