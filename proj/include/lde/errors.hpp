#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lde {

/// Malformed or out-of-range arguments (dimension mismatch, bad index, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to produce a usable answer.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A seeded generator ran out of its retry budget.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The system is not localizable in the requested vertex; carries the
/// singular values of R so callers can see how close it was.
class LocalizabilityError : public std::runtime_error {
public:
    LocalizabilityError(const std::string& what, std::vector<double> singular_values)
        : std::runtime_error(what), singular_values_(std::move(singular_values)) {}

    const std::vector<double>& singular_values() const noexcept { return singular_values_; }

private:
    std::vector<double> singular_values_;
};

/// Eigenvalues passed to the Vandermonde regression are not pairwise distinct.
class DegenerateSpectrumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lde
