#include "nlg/cli.hpp"

int main(int argc, char** argv) { return nlg::run_cli(argc, argv); }
