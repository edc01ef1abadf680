#include "godm/cli/commands.hpp"

int main(int argc, char** argv) { return godm::run_cli(argc, argv); }
