#include "labmine/cli.hpp"

int main(int argc, char** argv) { return labmine::run_cli(argc, argv); }
