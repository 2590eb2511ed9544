#include "pendantss/cli.hpp"

int main(int argc, char** argv) { return pendantss::cli::run(argc, argv); }
