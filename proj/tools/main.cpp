#include "cli/cli_main.hpp"

int main(int argc, char** argv) { return qhall::cli::cli_main(argc, argv); }
