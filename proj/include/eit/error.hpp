#pragma once

#include <stdexcept>
#include <string>

namespace eit {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller handed in something that violates a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// No admissible root of the steady-state polynomial.
class DomainError : public Error {
public:
    using Error::Error;
};

// A denominator in a closed-form susceptibility vanished.
class SingularityError : public Error {
public:
    using Error::Error;
};

// Integrator blew up, drifted, or hit the Fock ceiling in strict mode.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace eit
