#pragma once

#include <stdexcept>
#include <string>

namespace heatprop {

/// Base class for all library errors.  `code()` returns a stable
/// machine-readable tag that the CLI serializes into error reports.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A matrix required to be symmetric positive definite is not.
class NotSpd : public Error {
public:
    explicit NotSpd(const std::string& what) : Error("NotSpd", what) {}
};

/// Adaptive quadrature exceeded its depth or panel cap without meeting
/// the requested tolerance.
class QuadratureFailure : public Error {
public:
    explicit QuadratureFailure(const std::string& what)
        : Error("QuadratureFailure", what) {}
};

/// Mollifier fails an admissibility requirement (unit mass, nonnegativity,
/// support inside [-1, 1]).
class BadMollifier : public Error {
public:
    explicit BadMollifier(const std::string& what)
        : Error("BadMollifier", what) {}
};

/// A Lebesgue exponent is outside its admissible range.
class BadExponent : public Error {
public:
    explicit BadExponent(const std::string& what)
        : Error("BadExponent", what) {}
};

/// Exponent tuple violates the Young relation 1/p + 1/q = 1/r + 1,
/// or a conjugate-pair relation.
class ExponentMismatch : public Error {
public:
    explicit ExponentMismatch(const std::string& what)
        : Error("ExponentMismatch", what) {}
};

/// A standing assumption of an estimate is violated (for example the
/// subcritical exponent condition of the decay bound).
class AssumptionViolated : public Error {
public:
    explicit AssumptionViolated(const std::string& what)
        : Error("AssumptionViolated", what) {}
};

/// Grid is too large for a dense O(N^2n) reference computation.
class GridTooLarge : public Error {
public:
    explicit GridTooLarge(const std::string& what)
        : Error("GridTooLarge", what) {}
};

/// Two nets that must share epsilon lists, grids, and time lists do not.
class MismatchedNets : public Error {
public:
    explicit MismatchedNets(const std::string& what)
        : Error("MismatchedNets", what) {}
};

/// Scenario text could not be parsed.  Carries a 1-based line number
/// (0 when the location is not attributable to a line).
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error("ParseError", line > 0 ? "line " + std::to_string(line) + ": " + what
                                       : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Scenario parsed but fails semantic validation (non-SPD matrix,
/// exponent mismatch, bad grid, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what)
        : Error("ValidationError", what) {}
};

}  // namespace heatprop
