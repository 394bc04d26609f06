#include "commands.hpp"

int main(int argc, char** argv) { return chemid::cli::run(argc, argv); }
