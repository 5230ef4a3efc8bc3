#include <string>
#include <vector>

#include "splkit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return splkit::cli::run_command(args);
}
