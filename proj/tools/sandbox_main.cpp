#include "pas/api/cli.hpp"

int main(int argc, char** argv) { return pas::api::cli_run(argc, argv); }
