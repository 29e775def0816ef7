#include "rejectx/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
    return rejectx::cli::run(argc, argv, std::cout, std::cerr);
}
