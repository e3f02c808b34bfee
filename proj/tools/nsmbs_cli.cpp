#include "nsmbs/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::cout.imbue(std::locale::classic());
    return nsmbs::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
