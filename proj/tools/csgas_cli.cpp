#include "csgas/cli.hpp"

int main(int argc, char** argv) { return csgas::cli_main(argc, argv); }
