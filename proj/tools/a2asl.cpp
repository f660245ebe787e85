#include "a2asl/cli.hpp"

int main(int argc, char** argv) { return a2asl::cli::main(argc, argv); }
