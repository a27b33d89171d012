#include "gtrans/cli.hpp"

int main(int argc, char** argv) { return gtrans::run_cli(argc, argv); }
