#ifndef ETAMU_ERRORS_HPP
#define ETAMU_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace etamu {

// Input outside the mathematical domain of an operation (bad parameters,
// evaluation on a branch cut, contour/singularity conflicts).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A series or quadrature did not reach its tolerance within its budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A result was computed but its error estimate is outside the accepted band.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

}  // namespace etamu

#endif  // ETAMU_ERRORS_HPP
