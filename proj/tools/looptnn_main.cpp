#include <iostream>
#include <vector>

#include "looptnn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return looptnn::cli::run(std::move(args), std::cout, std::cerr);
}
