#include "mdcert/cli.hpp"

int main(int argc, char** argv) { return mdcert::run_cli(argc, argv); }
