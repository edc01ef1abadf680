#pragma once

#include <stdexcept>
#include <string>

namespace godm {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Graph/checkpoint file is missing or malformed. `row()` is 1-based within
/// the offending file, 0 when the error is not tied to a row.
class IoError : public Error {
public:
    IoError(const std::string& what, std::size_t row = 0)
        : Error(what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Invalid configuration or parameter combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or divergence during training or inference.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace godm
