#include <iostream>

#include "ctgp_cli/app.hpp"

int main(int argc, char** argv) { return ctgp::cli::cli_main(argc, argv, std::cout, std::cerr); }
