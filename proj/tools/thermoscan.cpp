#include <iostream>

#include "thermoscan/cli.hpp"

int main(int argc, char** argv)
{
    return thermoscan::runCli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
