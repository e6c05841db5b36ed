#include <iostream>
#include <string>
#include <vector>

#include "ptdist/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ptdist::run_cli(args, std::cout, std::cerr);
}
