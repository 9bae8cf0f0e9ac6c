#include <iostream>

#include "evenlab_app/cli.hpp"

int main(int argc, char** argv) { return evenlab::app::run_cli(argc, argv, std::cerr); }
