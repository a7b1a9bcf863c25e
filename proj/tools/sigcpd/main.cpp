#include "sigcpd/cli.hpp"

int main(int argc, char** argv) { return sigcpd::cli::main(argc, argv); }
