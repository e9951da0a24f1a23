#include "logitbench/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return logitbench::run_cli(argc, argv, std::cout, std::cerr);
}
