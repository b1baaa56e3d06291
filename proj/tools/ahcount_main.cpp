#include "ahcount/harness.hpp"

int main(int argc, char** argv) { return ahc::cli_main(argc, argv); }
