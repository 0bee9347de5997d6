#include "pcwinter/cli.hpp"

int main(int argc, char** argv) { return pcwinter::run_cli(argc, argv); }
