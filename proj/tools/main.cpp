#include "moldiff/cli.hpp"

int main(int argc, char** argv) { return moldiff::cli::run(argc, argv); }
