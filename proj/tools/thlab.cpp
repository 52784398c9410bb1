#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return thlab::cli::dispatch(argc, argv, std::cout, std::cerr); }
