#include <qlim/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    return qlim::cli::main(argc, argv, std::cout, std::cerr);
}
