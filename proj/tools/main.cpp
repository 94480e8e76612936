#include "hyst/cli.hpp"

int main(int argc, char** argv) { return hyst::run_cli(argc, argv); }
