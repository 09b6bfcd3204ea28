#include "cli.hpp"

int main(int argc, char** argv) { return qmetro::cli::main_entry(argc, argv); }
