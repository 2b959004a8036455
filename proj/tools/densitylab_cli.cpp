#include "densitylab/cli.hpp"

int main(int argc, char** argv) { return densitylab::cli::run(argc, argv); }
