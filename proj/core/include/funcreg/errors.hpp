#ifndef FUNCREG_ERRORS_HPP
#define FUNCREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace funcreg {

// Bad user input: malformed files, mismatched grids, invalid parameters.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure: singular systems, degenerate GCV, underflow.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace funcreg

#endif
