#include <iostream>

#include "qiup/cli/commands.hpp"

int main(int argc, char** argv) { return qiup::cli::run(argc, argv, std::cout, std::cerr); }
