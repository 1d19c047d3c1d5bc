#pragma once

#include <stdexcept>
#include <string>

namespace recomb {

// Bad arguments, malformed files, violated preconditions.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A computed object failed one of its structural checks (row sums,
// positivity, normalisation).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace recomb
