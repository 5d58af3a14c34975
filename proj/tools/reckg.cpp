#include <iostream>

#include "reckg/cli.hpp"

int main(int argc, char** argv) {
    reckg::cli::configure_logging();
    return reckg::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
