#pragma once

#include <stdexcept>
#include <string>

namespace kms {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad mesh, out-of-range parameter, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative method failed to reach its tolerance within the iteration cap,
/// or detected a breakdown (e.g. loss of monotonicity).
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A run was vetoed because the model does not satisfy the standing hypotheses.
class HypothesisVeto : public Error {
public:
    using Error::Error;
};

/// The fixed-point search did not produce the expected solution structure.
class FixedPointError : public Error {
public:
    using Error::Error;
};

/// Configuration file does not follow the documented schema.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message)
        : Error(path + ": " + message), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace kms
