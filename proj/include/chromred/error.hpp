#pragma once

#include <stdexcept>
#include <string>

namespace chromred {

// Errors are grouped by how a caller (and the CLI exit code) should react.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input violates a stated precondition. Exit code 2.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class ParseError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class ParameterDegenerate : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class InvalidEdge : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class EdgeCapExceeded : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class ExceptionalPair : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class OutsideRegion : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// A bounded search ran out of room. Exit code 3.
class SearchExhausted : public Error {
public:
    using Error::Error;
};

class NotFound : public SearchExhausted {
public:
    using SearchExhausted::SearchExhausted;
};

class CoverNotFound : public SearchExhausted {
public:
    using SearchExhausted::SearchExhausted;
};

// A numeric budget did not hold, e.g. nothing reconstructs. Exit code 4.
class BudgetFailure : public Error {
public:
    using Error::Error;
};

class NoCandidate : public BudgetFailure {
public:
    using BudgetFailure::BudgetFailure;
};

class DenominatorOverflow : public BudgetFailure {
public:
    using BudgetFailure::BudgetFailure;
};

} // namespace chromred
