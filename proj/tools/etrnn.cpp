#include "etrnn/cli.hpp"

int main(int argc, char** argv) { return etrnn::cli_main(argc, argv); }
