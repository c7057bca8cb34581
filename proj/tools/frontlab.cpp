#include "frontlab/commands.hpp"

int main(int argc, char** argv) { return frontlab::run_cli(argc, argv); }
