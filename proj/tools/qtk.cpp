#include "qtk/cli.hpp"

int main(int argc, char** argv) { return qtk::cli::run(argc, argv); }
