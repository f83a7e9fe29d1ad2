#pragma once

#include <stdexcept>
#include <string>

namespace gasket {

/// Caller violated a precondition (bad word length, unknown vertex, malformed config).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested size exceeds a memory guard.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical scheme failed to converge or was used outside its stability range.
class SchemeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical integration did not reach the requested tolerance.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sampled driver data contradicts the constants declared for it.
class DeclaredConstantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear system assembly or factorisation failed.
class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gasket
