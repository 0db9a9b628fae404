#include "hpa/cli.hpp"

int main(int argc, char** argv) { return hpa::cli::run(argc, argv); }
