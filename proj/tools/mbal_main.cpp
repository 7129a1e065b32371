#include "mbal/cli.hpp"

int main(int argc, char** argv) { return mbal::run_cli(argc, argv); }
