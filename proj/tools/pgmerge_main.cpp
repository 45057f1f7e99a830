#include "pgmerge/cli.hpp"

int main(int argc, char** argv) { return pgmerge::run_cli(argc, argv); }
