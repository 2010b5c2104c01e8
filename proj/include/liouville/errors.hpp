#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace liouville {

/// Base of every error raised by the library. `kind()` is a stable tag that
/// the CLI copies into its JSON error object.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message) : Error("InvalidArgument", message) {}
};

/// Coupling matrix violates the admissibility hypothesis (sign and order conditions).
class InvalidMatrix : public Error {
public:
    InvalidMatrix(const std::string& message, std::vector<std::string> violations)
        : Error("InvalidMatrix", message), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

class SingularMatrix : public Error {
public:
    explicit SingularMatrix(const std::string& message) : Error("SingularMatrix", message) {}
};

class NegativeIntrinsicRho : public Error {
public:
    NegativeIntrinsicRho(int row, const std::string& message)
        : Error("NegativeIntrinsicRho", message), row_(row) {}

    int row() const noexcept { return row_; }

private:
    int row_;
};

class InvalidRho : public Error {
public:
    explicit InvalidRho(const std::string& message) : Error("InvalidRho", message) {}
};

/// The parameter lies on the critical hypersurface Gamma_k, where the degree
/// is undefined.
class OnCriticalSet : public Error {
public:
    OnCriticalSet(int k, const std::string& message) : Error("OnCriticalSet", message), k_(k) {}

    int k() const noexcept { return k_; }

private:
    int k_;
};

class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& message)
        : Error("ParseError", field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace liouville
