#include "symlearn/cli.hpp"

int main(int argc, char** argv) { return symlearn::cli::run(argc, argv); }
