#include "commplan/cli.hpp"

int main(int argc, char** argv) { return commplan::cli_main(argc, argv); }
