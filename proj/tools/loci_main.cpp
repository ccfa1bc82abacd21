#include "loci/cli.hpp"

int main(int argc, char** argv) { return loci::cli_run(argc, argv); }
