#pragma once

#include <stdexcept>
#include <string>

namespace sonoshape {

/// Precondition violated by the caller (bad index, mismatched sizes, invalid spec).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation requested outside the domain where a quantity is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Configuration or input file failed validation before any work started.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense boundary system could not be solved to tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// Series reference solution failed to converge within its term budget.
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape population could not be produced within its retry budget.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Channel images could not be assembled because a (source, band) grid is missing.
class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dataset on disk is missing, malformed or fails digest verification.
class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sonoshape
