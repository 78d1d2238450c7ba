#include "ssgn/cli.hpp"

int main(int argc, char** argv) { return ssgn::cli::run(argc, argv); }
