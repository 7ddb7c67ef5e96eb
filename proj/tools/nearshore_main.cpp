#include "nearshore/cli.hpp"

int main(int argc, char** argv) { return nearshore::cli::run(argc, argv); }
