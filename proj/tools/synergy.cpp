// SPDX-License-Identifier: Apache-2.0
#include "synergy/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return synergy::cli::run(argc, argv, std::cout, std::cerr); }
