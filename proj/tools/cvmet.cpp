#include "cvmet/cli.hpp"

int main(int argc, char** argv) { return cvmet::run_cli(argc, argv); }
