#include "bayesgeom/cli.hpp"

int main(int argc, char** argv) { return bayesgeom::cli::main_entry(argc, argv); }
