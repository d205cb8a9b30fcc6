#include "resolimit/cli.hpp"

int main(int argc, char** argv) { return resolimit::cli_main(argc, argv); }
