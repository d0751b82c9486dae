#include <iostream>

#include "hsieve/cli.hpp"

int main(int argc, char** argv) {
    return hsieve::cli::run(argc, argv, std::cout, std::cerr);
}
