#include "splinewalk/cli.hpp"

int main(int argc, char** argv) { return splinewalk::run_command(argc, argv); }
