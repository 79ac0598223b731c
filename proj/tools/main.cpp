#include <vector>

#include "travmap/pipeline.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return travmap::cli::run(args);
}
