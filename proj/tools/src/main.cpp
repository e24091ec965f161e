#include <iostream>

#include "rbelab_cli/app.hpp"

int main(int argc, char** argv) { return rbelab::cli::run_app(argc, argv, std::cout, std::cerr); }
