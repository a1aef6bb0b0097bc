#include "emgvalid/cli.hpp"

int main(int argc, char** argv) { return emgvalid::cli::run(argc, argv); }
