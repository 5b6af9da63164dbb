#include "commands.hpp"

int main(int argc, char** argv) { return gisl::cli::run(argc, argv); }
