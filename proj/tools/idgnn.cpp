#include "idgnn/cli.hpp"

int main(int argc, char** argv) { return idgnn::cli::run(argc, argv); }
