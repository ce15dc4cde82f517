#pragma once

#include <stdexcept>
#include <string>

namespace bayesgeom {

/// A numerical computation failed. `term()` names the quantity that could not
/// be evaluated (e.g. "K(2*tau, 2*n0)") so callers can report it verbatim.
class NumericalError : public std::runtime_error {
 public:
    NumericalError(std::string term, const std::string& what)
        : std::runtime_error(what), term_(std::move(term)) {}

    const std::string& term() const noexcept { return term_; }

 private:
    std::string term_;
};

/// The squared function does not have a finite integral over its domain.
class NotSquareIntegrable : public NumericalError {
 public:
    using NumericalError::NumericalError;
};

/// A conjugate-family normalizer integral diverges.
class ImproperMember : public NumericalError {
 public:
    using NumericalError::NumericalError;
};

/// Invalid user configuration (bad grid, missing seed, unknown command...).
class ValidationError : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace bayesgeom
