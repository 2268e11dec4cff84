#include "dq/cli.hpp"

int main(int argc, char** argv) { return dq::shell::run(argc, argv); }
