#include <iostream>

#include "recomb/cli.hpp"

int main(int argc, char** argv)
{
    return recomb::cli::run(argc, argv, std::cout, std::cerr);
}
