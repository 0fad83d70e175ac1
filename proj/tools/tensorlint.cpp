#include <iostream>

#include "tensorlint/driver.hpp"

int main(int argc, char** argv) { return tensorlint::driver::main_entry(argc, argv, std::cout, std::cerr); }
