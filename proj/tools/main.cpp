#include <iostream>

#include "cbci_cli/commands.hpp"

int main(int argc, char** argv) {
    return cbci::cli::run(argc, argv, std::cout, std::cerr);
}
