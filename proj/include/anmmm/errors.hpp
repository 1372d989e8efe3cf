#pragma once

#include <stdexcept>
#include <string>

namespace anmmm {

// Numerical failure (non-finite values, failed Cholesky factorization).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// The latent matrix collapsed: HSIC(X, Theta) underflowed and the log
// penalty is undefined. The caller must reinitialize.
class DegenerateLatentError : public NumericError {
public:
    explicit DegenerateLatentError(const std::string& msg) : NumericError(msg) {}
};

// Every restart of a fit ended in a degenerate latent configuration.
class EstimationFailedError : public std::runtime_error {
public:
    explicit EstimationFailedError(const std::string& msg) : std::runtime_error(msg) {}
};

// A variable has zero sample variance and cannot be standardized.
class ConstantVariableError : public std::invalid_argument {
public:
    explicit ConstantVariableError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, long line) : std::runtime_error(msg), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

}  // namespace anmmm
