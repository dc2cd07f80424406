#include <iostream>

#include "acme/cli/app.hpp"

int main(int argc, char** argv) { return acme::cli::run(argc, argv, std::cout, std::cerr); }
