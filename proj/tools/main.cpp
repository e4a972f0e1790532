#include <iostream>

#include "aoaloc/app/commands.hpp"

int main(int argc, char** argv) { return aoaloc::app::run_cli(argc, argv, std::cout, std::cerr); }
