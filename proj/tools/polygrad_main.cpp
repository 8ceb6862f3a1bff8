#include "polygrad/cli.hpp"

int main(int argc, char** argv) { return polygrad::cli_main(argc, argv); }
