#include <iostream>

#include "bkhm/cli.hpp"

int main(int argc, char** argv) {
    return bkhm::cli_dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
