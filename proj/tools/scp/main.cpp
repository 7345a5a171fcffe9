#include <iostream>

#include "scp/commands.hpp"

int main(int argc, char** argv) {
    return scp::cli::run(argc, argv, {std::cout, std::cerr});
}
