#include <iostream>
#include <string>
#include <vector>

#include "collapse/cli.hpp"

int main(int argc, char** argv) {
    return collapse::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
