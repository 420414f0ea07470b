#include "cli.hpp"

int main(int argc, char** argv) { return uforest::cli::run(argc, argv); }
