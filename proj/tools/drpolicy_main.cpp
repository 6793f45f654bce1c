#include "drpolicy/cli.hpp"

int main(int argc, char** argv) { return drpolicy::cli_main(argc, argv); }
