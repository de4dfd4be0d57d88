#include "zksem/cli.hpp"

int main(int argc, char** argv) { return zksem::cli_dispatch(argc, argv); }
