#pragma once

#include <stdexcept>
#include <string>

namespace amm {

// Bad input: malformed menus, out-of-range parameters, dimension mismatch.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Non-convergence, non-finite values, failed internal consistency checks.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace amm
