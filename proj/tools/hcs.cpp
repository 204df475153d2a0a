#include "hcs/cli.hpp"

int main(int argc, char** argv) { return hcs::cli::run_cli(argc, argv); }
