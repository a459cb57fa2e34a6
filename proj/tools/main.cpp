#include "cli_app.hpp"

int main(int argc, char** argv) { return navbench::cli::run_cli(argc, argv); }
