#pragma once

/// \file errors.hpp
/// Error taxonomy for the X-state discord library.
///
/// Every failure mode is a distinct exception type so that callers (and the
/// CLI) can name the violated constraint precisely instead of pattern-matching
/// message strings.  All types derive from xqd::error, which derives from
/// std::runtime_error.

#include <stdexcept>
#include <string>

namespace xqd {

/// Base class of all library exceptions.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Input state fails one of the density-matrix constraints.
/// `violation()` reports by how much the constraint was missed.
class validation_error : public error {
public:
    enum class code { negative_weight, trace_not_one, positivity_violated };

    validation_error(code c, const std::string& detail, double violation)
        : error(name_of(c) + ": " + detail), code_(c), violation_(violation) {}

    code which() const noexcept { return code_; }
    double violation() const noexcept { return violation_; }

    static std::string name_of(code c) {
        switch (c) {
            case code::negative_weight: return "NegativeWeight";
            case code::trace_not_one: return "TraceNotOne";
            case code::positivity_violated: return "PositivityViolated";
        }
        return "ValidationError";
    }

private:
    code code_;
    double violation_;
};

/// Argument outside the mathematical domain of an operation.
class domain_error : public error {
public:
    explicit domain_error(const std::string& detail) : error("DomainError: " + detail) {}
};

/// Derivative requested where the entropy curve is singular (steered state
/// within 1e-9 of purity; h'(r) diverges as r -> 1).
class singular_point : public error {
public:
    explicit singular_point(const std::string& detail) : error("SingularPoint: " + detail) {}
};

/// A measurement branch with (numerically) zero outcome probability has no
/// conditional state.
class degenerate_outcome : public error {
public:
    explicit degenerate_outcome(const std::string& detail)
        : error("DegenerateOutcome: " + detail) {}
};

/// Operation requires a non-degenerate ellipse axis that is below threshold.
class degenerate_ellipse : public error {
public:
    explicit degenerate_ellipse(const std::string& detail)
        : error("DegenerateEllipse: " + detail) {}
};

/// The inverse problem (state from prescribed ellipse data) has no physical
/// solution.
class no_solution : public error {
public:
    explicit no_solution(const std::string& detail) : error("NoSolution: " + detail) {}
};

/// Reconstructing a measurement from a decomposition failed an internal
/// consistency check; the inputs do not belong together.
class inversion_failed : public error {
public:
    explicit inversion_failed(const std::string& detail)
        : error("InversionFailed: " + detail) {}
};

/// The entropy curve shows two or more persistent inflection points.  The
/// geometric method relies on there being at most one; rather than guessing,
/// the classifier reports the anomaly and callers fall back to the
/// brute-force envelope.
class curvature_violation : public error {
public:
    explicit curvature_violation(const std::string& detail)
        : error("CurvatureViolation: " + detail) {}
};

}  // namespace xqd
