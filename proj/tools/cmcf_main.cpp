#include "cmcf/cli.hpp"

int main(int argc, char** argv) { return cmcf::cli::main(argc, argv); }
