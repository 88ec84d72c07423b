#pragma once

#include <stdexcept>
#include <string>

namespace scalemix {

// Broad classes; the CLI maps them to exit codes (usage 64, domain 65, data 66).
enum class ErrorCategory { usage, domain, data };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& msg)
        : std::runtime_error(msg), category_(category) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// A scalar parameter lies outside its stated open domain.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

// Re(z) outside the strip of convergence of a Mellin transform.
class StripError : public Error {
public:
    explicit StripError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

// |M[G](z)| below the meaningful double-precision threshold.
class DivisionHazardError : public Error {
public:
    explicit DivisionHazardError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

class UnsupportedFamilyError : public Error {
public:
    explicit UnsupportedFamilyError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

// u_star on an excluded vertical line, or similar estimator infeasibility.
class FeasibilityError : public Error {
public:
    explicit FeasibilityError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

// Bad evaluation point (e.g. grid x below the supported range).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

// Invalid configuration (truncation below the admissible minimum, empty grids, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

// A stated precondition fails numerically (e.g. the weighted sup objective
// is unbounded near zero).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

// An integral required to be finite shows no numerical convergence.
class IntegrabilityError : public Error {
public:
    explicit IntegrabilityError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

// Characteristic function of the noise vanishes inside the inversion window.
class IllPosedError : public Error {
public:
    explicit IllPosedError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

// Gamma function evaluated too close to a pole.
class PoleError : public Error {
public:
    explicit PoleError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(ErrorCategory::data, msg) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error(ErrorCategory::usage, msg) {}
};

}  // namespace scalemix
