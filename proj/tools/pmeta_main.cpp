#include "pmeta/cli.hpp"

int main(int argc, char** argv) { return pmeta::cli::run(argc, argv); }
