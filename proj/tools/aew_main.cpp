#include "aew/cli.hpp"

int main(int argc, char** argv) { return aew::parse_and_dispatch(argc, argv); }
