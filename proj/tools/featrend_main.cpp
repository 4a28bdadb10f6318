#include "featrend/cli.hpp"

int main(int argc, char** argv) { return featrend::run_cli(argc, argv); }
