#include <iostream>

#include "gme/cli.hpp"

int main(int argc, char** argv) {
    return gme::cli::run(argc, argv, std::cout, std::cerr);
}
