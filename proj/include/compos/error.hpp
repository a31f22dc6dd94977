#ifndef COMPOS_ERROR_HPP
#define COMPOS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace compos {

/// Broad failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind {
    invalid_dimension,
    contract_violation,
    numeric_overflow,
    degenerate_probability,
    non_convergence,
    rank_deficiency,
    insufficient_data,
    identifiability,
    zeros_unsupported,
    crosscheck_mismatch,
    config,
    data,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when an iterative solver exhausts its iteration budget.
/// Carries the per-iteration max-norm of the quasi-score.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> trace)
        : Error(ErrorKind::non_convergence, what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const { return trace_; }

private:
    std::vector<double> trace_;
};

/// Row-level ingestion failure; `line` is 1-based and counts the header.
class DataError : public Error {
public:
    DataError(std::size_t line, const std::string& what)
        : Error(ErrorKind::data, "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace compos

#endif
