#pragma once

#include <stdexcept>
#include <string>

namespace collatzlab {

// Base for every error this library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSize : public Error {
public:
    using Error::Error;
};

// Raised when M' / M~ is requested for a k whose last column has a single nonzero.
class NotApplicable : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class InvalidFamily : public Error {
public:
    using Error::Error;
};

// Exact division left a remainder. Inside the elimination engine this is a bug.
class NotDivisible : public Error {
public:
    using Error::Error;
};

} // namespace collatzlab
