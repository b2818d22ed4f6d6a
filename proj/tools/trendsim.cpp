#include "trendsim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return trendsim::run_cli(argc, argv, std::cout, std::cerr);
}
