#include <iostream>

#include "misuseforge/cli.hpp"

int main(int argc, char** argv)
{
    return misuseforge::run_cli(argc, argv, std::cout, std::cerr);
}
