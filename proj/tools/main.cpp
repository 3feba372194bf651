#include "tvdeblur/cli.hpp"

int main(int argc, char** argv) { return tvdeblur::cli::run_cli(argc, argv); }
