#include "ecpm/cli.hpp"

int main(int argc, char** argv) { return ecpm::cli::run(argc, argv); }
