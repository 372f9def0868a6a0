#include <iostream>
#include <string>
#include <vector>

#include "opial/cli.hpp"

int main(int argc, char** argv) {
    return opial::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
