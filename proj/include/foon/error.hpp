#ifndef FOON_ERROR_HPP
#define FOON_ERROR_HPP

#include <stdexcept>
#include <string>

namespace foon {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid domain value (bad label, bad state set, broken invariant).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Syntax or semantic error in an input file. Always carries the 1-based
/// line number the problem was detected on.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line)
        : Error(msg + ", line " + std::to_string(line)), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

/// Projected expansion output would exceed the configured unit cap.
class ExpansionLimitError : public Error {
public:
    ExpansionLimitError(std::size_t projected, std::size_t limit)
        : Error("expansion would produce " + std::to_string(projected) +
                " candidate units, exceeding the cap of " + std::to_string(limit)),
          projected_(projected), limit_(limit) {}

    std::size_t projected_units() const { return projected_; }
    std::size_t limit() const { return limit_; }

private:
    std::size_t projected_;
    std::size_t limit_;
};

} // namespace foon

#endif
