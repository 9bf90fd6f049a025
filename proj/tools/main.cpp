#include "commands.hpp"

int main(int argc, char** argv) { return ioncrystal::cli::main_entry(argc, argv); }
