// Error types shared across the library.

#ifndef RA_ERROR_HH
#define RA_ERROR_HH

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ra {

// Base class for all errors raised by the library on bad input or
// violated preconditions. Internal invariant violations use assert.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parse failure with a source position (1-based line, 1-based column).
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t col, const std::string& what_arg)
        : Error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what_arg),
          line(line), col(col) {}

    std::size_t line;
    std::size_t col;
};

} // namespace ra

#endif
