#include <iostream>

#include <mwq/cli.hpp>

int main(int argc, char **argv) { return mwq::cli::run(argc, argv, std::cout, std::cerr); }
