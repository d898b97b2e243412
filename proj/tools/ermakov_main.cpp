#include "ermakov/cli.hpp"

int main(int argc, char** argv) { return ermakov::run_cli(argc, argv); }
