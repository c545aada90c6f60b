#include <iostream>

#include "mdcf/cli/app.hpp"

int main(int argc, char** argv) { return mdcf::cli::run(argc, argv, std::cout, std::cerr); }
