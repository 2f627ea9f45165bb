#include "ecp/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return ecp::cli::run(argc, argv, std::cout, std::cerr);
}
