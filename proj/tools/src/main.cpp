#include "vipr_cli/commands.hpp"

int main(int argc, char** argv) { return vipr::cli::run(argc, argv); }
