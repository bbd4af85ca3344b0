#pragma once

#include <stdexcept>
#include <string>

namespace ccq {

// Base class for all library errors. Subclasses mirror the failure modes of
// the numeric core so callers can react per condition instead of parsing
// message strings.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class NonSquareError : public Error {
public:
    using Error::Error;
};

class NotHermitianError : public Error {
public:
    using Error::Error;
};

class NotPsdError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class DimensionOverflow : public Error {
public:
    using Error::Error;
};

class SizeMismatch : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class InvalidAlpha : public Error {
public:
    using Error::Error;
};

class UnreachableOutput : public Error {
public:
    using Error::Error;
};

class RateTooLow : public Error {
public:
    using Error::Error;
};

class NoPositiveExponent : public Error {
public:
    using Error::Error;
};

class RateInfeasible : public Error {
public:
    using Error::Error;
};

class InfeasibleBlocklength : public Error {
public:
    using Error::Error;
};

class MessageOutOfRange : public Error {
public:
    using Error::Error;
};

class PartitionArityError : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class EnumerationBudgetExceeded : public Error {
public:
    using Error::Error;
};

// Thrown when a checked theorem bound fails; the message carries the witness.
class BoundViolated : public Error {
public:
    using Error::Error;
};

class ConfigInvalid : public Error {
public:
    using Error::Error;
};

} // namespace ccq
