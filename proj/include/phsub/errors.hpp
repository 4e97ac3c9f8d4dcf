#pragma once

#include <stdexcept>
#include <string>

namespace phsub {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its mathematical domain (|r| >= 1, eta outside (0,1], ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A caller broke an operation's precondition (wrong support, unnormalized input).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Normalizing a state whose norm is exactly zero.
class ZeroStateError : public Error {
public:
    using Error::Error;
};

/// The requested detection outcome has zero probability.
class HeraldImpossibleError : public Error {
public:
    using Error::Error;
};

/// A computation would exceed a configured size limit.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Result violates a numerical sanity bound (e.g. a probability below -1e-12).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace phsub
