#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spheredepth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)) {}
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// Raised by the CSV reader; carries 1-based row/column coordinates of the offending cell.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row_(row), column_(column) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_ = 0;
    std::size_t column_ = 0;
};

/// Wraps an error raised while scoring one element of a batch.
class BatchError : public Error {
public:
    BatchError(std::size_t index, const std::string& what)
        : Error("point " + std::to_string(index) + ": " + what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

namespace detail {

inline void require(bool condition, const char* message) {
    if (!condition) throw InvalidParameter(message);
}

inline void require_dim(std::size_t expected, std::size_t got) {
    if (expected != got) throw DimensionMismatch(expected, got);
}

}  // namespace detail
}  // namespace spheredepth
