#include "qgsaddle/cli.hpp"

int main(int argc, char** argv) { return qgsaddle::run_command(argc, argv); }
