#include "whitham/cli.hpp"

int main(int argc, char** argv) { return whitham::cli::run(argc, argv); }
