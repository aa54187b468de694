#pragma once

#include <stdexcept>
#include <string>

namespace fracfit {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A series or iterative scheme failed to converge within its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A series term left the representable floating-point range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Parameters are valid individually but jointly degenerate
/// (e.g. coincident rate constants in a closed form with a pole).
class DegenerateParametersError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; message carries file name and line number.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input violating a data invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Unknown dataset name, or a dataset file that cannot be resolved.
class DatasetError : public Error {
public:
    using Error::Error;
};

/// A non-bundled dataset slot whose supplementary file has not been ingested.
class MissingDataError : public DatasetError {
public:
    using DatasetError::DatasetError;
};

/// Unknown model name requested from the registry.
class UnknownModelError : public Error {
public:
    using Error::Error;
};

/// Every start of a multi-start fit failed to evaluate.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace fracfit
