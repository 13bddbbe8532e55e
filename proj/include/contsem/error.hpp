#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contsem {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input (rationals, moduli, formulas, files).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(line == 0 ? what
                          : what + " at line " + std::to_string(line) + ", column " +
                                std::to_string(column)),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// An operation was called on data violating its precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace contsem
