#include "folspec/cli.hpp"

int main(int argc, char** argv) { return folspec::run_cli(argc, argv); }
