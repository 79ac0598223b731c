#pragma once

#include <stdexcept>
#include <string>

namespace travmap {

// Malformed user input: bad files, dimension mismatches, out-of-range
// parameters. The CLI maps this to exit code 1; any other exception
// escaping to main is treated as an internal failure (exit code 2).
class InputError : public std::runtime_error {
  public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace travmap
