#include "bregman/commands.hpp"

int main(int argc, char** argv) { return bregman::run_cli(argc, argv); }
