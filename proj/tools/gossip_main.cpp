#include <iostream>
#include <vector>

#include "gossip/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gossip::run_command(args, std::cout, std::cerr);
}
