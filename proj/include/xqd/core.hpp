#pragma once

/// \file core.hpp
/// Two-qubit X-state model: validation, spectra, entropies, mutual
/// information, and the steering map from measurement elements on qubit A to
/// post-measurement ensembles of qubit B.
///
/// Conventions used throughout the library:
///  - An X state is parameterized by six reals (a, b, c, d, u, v): the
///    diagonal (a, b, c, d) and the two anti-diagonal coherences u (outer
///    block, |00><11|) and v (inner block, |01><10|), both taken >= 0.
///    Phases of u and v are removable by local unitaries, so the sign
///    normalization is a gauge fixing, not an approximation.
///  - All entropies are in bits (log base 2).
///  - Bloch coordinates: qubit A has z_A = a+b-c-d, qubit B has
///    z_B = a-b+c-d; measurement directions live in the x-z plane.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "xqd/errors.hpp"

namespace xqd {

/// Shared numeric tolerances.  Acceptance-level tolerances live with the
/// tests; these are the library-internal contract values.
namespace tol {
/// Slack applied to trace / positivity validation.
inline constexpr double validation = 1e-12;
/// Semi-axes below this are treated as degenerate (flat) directions.
inline constexpr double axis_degenerate = 1e-10;
/// Derivatives are refused within this distance of the r = 1 singularity.
inline constexpr double singular_r = 1e-9;
/// |d2| below this counts as "flat" during convexity classification.
inline constexpr double convexity = 1e-9;
/// Completeness residual allowed for a POVM.
inline constexpr double povm_completeness = 1e-10;
/// Ties at regime boundaries are resolved within this margin.
inline constexpr double boundary_tie = 1e-10;
/// Residual required of the endpoint-tangent solve.
inline constexpr double tangent_residual = 1e-10;
/// A measurement branch below this probability has no conditional state.
inline constexpr double zero_probability = 1e-14;
}  // namespace tol

inline constexpr double ln2 = 0.6931471805599453094172321214581766;
inline constexpr double pi = 3.1415926535897932384626433832795029;

/// Validated two-qubit X state.  Construct through validate_xstate().
struct XState {
    double a = 0, b = 0, c = 0, d = 0;  ///< diagonal weights, sum to 1
    double u = 0, v = 0;                ///< coherences, u^2 <= ad, v^2 <= bc
};

/// Bloch z-coordinates of the two reduced states.
struct ReducedBloch {
    double z_A = 0;  ///< a + b - c - d
    double z_B = 0;  ///< a - b + c - d
};

/// One rank-1 measurement element t * (1 + n . sigma) / 2 with direction
/// n = (nx, nz) restricted to the x-z plane.
struct PovmElement {
    double t = 0;   ///< weight, > 0
    double nx = 0;  ///< x component of the unit direction
    double nz = 0;  ///< z component of the unit direction
};

/// A complete measurement: sum t_i = 2 and sum t_i * n_i = 0.
struct Povm {
    std::vector<PovmElement> elements;
};

/// Measurement branch: outcome probability and the conditional Bloch point
/// of qubit B in the x-z plane.
struct SteeredOutcome {
    double probability = 0;
    double x = 0;
    double z = 0;
};

/// Weighted point of an ensemble in the x-z plane (weights of one ensemble
/// sum to 1).
struct WeightedPoint {
    double weight = 0;
    double x = 0;
    double z = 0;
};

/// Validate the six X-state parameters against the density-matrix
/// constraints: nonnegative diagonal, unit trace, u^2 <= ad, v^2 <= bc.
/// Violations beyond tol::validation are rejected, never repaired.  The signs
/// of u and v are normalized to >= 0 (local-unitary gauge); values within
/// tolerance of a constraint boundary are kept as passed.
inline XState validate_xstate(double a, double b, double c, double d, double u, double v) {
    const double vals[6] = {a, b, c, d, u, v};
    const char* names[6] = {"a", "b", "c", "d", "u", "v"};
    for (int i = 0; i < 6; ++i) {
        if (!std::isfinite(vals[i]))
            throw validation_error(validation_error::code::negative_weight,
                                   std::string(names[i]) + " is not finite", 0.0);
    }
    for (int i = 0; i < 4; ++i) {
        if (vals[i] < -tol::validation)
            throw validation_error(validation_error::code::negative_weight,
                                   std::string(names[i]) + " < 0", -vals[i]);
    }
    // Tiny negatives (within tolerance) are flushed to zero so that
    // downstream square roots stay real.
    a = std::max(a, 0.0);
    b = std::max(b, 0.0);
    c = std::max(c, 0.0);
    d = std::max(d, 0.0);
    const double trace = a + b + c + d;
    if (std::abs(trace - 1.0) > tol::validation)
        throw validation_error(validation_error::code::trace_not_one,
                               "a+b+c+d = " + std::to_string(trace), std::abs(trace - 1.0));
    u = std::abs(u);
    v = std::abs(v);
    if (u * u > a * d + tol::validation)
        throw validation_error(validation_error::code::positivity_violated,
                               "u^2 > a*d", u * u - a * d);
    if (v * v > b * c + tol::validation)
        throw validation_error(validation_error::code::positivity_violated,
                               "v^2 > b*c", v * v - b * c);
    return XState{a, b, c, d, u, v};
}

inline ReducedBloch reduced_bloch(const XState& s) {
    return ReducedBloch{s.a + s.b - s.c - s.d, s.a - s.b + s.c - s.d};
}

/// Entropy of a qubit with Bloch radius x:
///   h(x) = -((1+x)/2) log2((1+x)/2) - ((1-x)/2) log2((1-x)/2).
/// h(0) = 1, h(1) = 0 (evaluated by branch, no NaN).  Arguments outside
/// [0, 1] by more than 1e-12 are rejected.
inline double binary_entropy(double x) {
    if (!(x >= -tol::validation && x <= 1.0 + tol::validation))
        throw domain_error("binary_entropy argument " + std::to_string(x) + " outside [0,1]");
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    const double p = 0.5 * (1.0 + x);
    const double q = 0.5 * (1.0 - x);
    return -(p * std::log2(p) + q * std::log2(q));
}

/// Eigenvalues of the X-state density matrix.  The matrix splits into two
/// 2x2 blocks, giving the closed form
///   (a+d)/2 +- sqrt(((a-d)/2)^2 + u^2),  (b+c)/2 +- sqrt(((b-c)/2)^2 + v^2).
/// Order: outer block (+,-), inner block (+,-).
inline std::array<double, 4> xstate_eigenvalues(const XState& s) {
    const double mo = 0.5 * (s.a + s.d);
    const double ro = std::sqrt(0.25 * (s.a - s.d) * (s.a - s.d) + s.u * s.u);
    const double mi = 0.5 * (s.b + s.c);
    const double ri = std::sqrt(0.25 * (s.b - s.c) * (s.b - s.c) + s.v * s.v);
    return {mo + ro, mo - ro, mi + ri, mi - ri};
}

/// Shannon entropy in bits of a probability list; 0*log(0) == 0 by branch,
/// and values within validation tolerance below zero are treated as zero.
template <class Range>
inline double shannon_entropy(const Range& probabilities) {
    double sum = 0.0;
    for (double p : probabilities) {
        if (p > 0.0) sum -= p * std::log2(p);
    }
    return sum;
}

/// Von Neumann entropy S(rho_AB) in bits.
inline double joint_entropy(const XState& s) {
    return shannon_entropy(xstate_eigenvalues(s));
}

/// Mutual information I = S(rho_A) + S(rho_B) - S(rho_AB), with the marginal
/// entropies h(|z_A|) and h(|z_B|).
inline double mutual_information(const XState& s) {
    const ReducedBloch rb = reduced_bloch(s);
    return binary_entropy(std::abs(rb.z_A)) + binary_entropy(std::abs(rb.z_B)) -
           joint_entropy(s);
}

/// Apply the measurement element t * (1 + n . sigma) / 2 on qubit A and
/// return the outcome probability together with the conditional Bloch point
/// of qubit B.  With the correlation data s = (0, z_B) and
/// T = diag(2(u+v), a-b-c+d) acting on (x, z):
///   probability = t (1 + nz z_A) / 2,
///   point       = (s + T n) / (1 + nz z_A).
/// Rank-1 elements steer onto the boundary of the steering ellipse.
inline SteeredOutcome steer(const XState& s, double nx, double nz, double t) {
    if (std::abs(nx * nx + nz * nz - 1.0) > 1e-12)
        throw domain_error("steer direction is not a unit vector");
    if (!(t > 0.0)) throw domain_error("steer weight must be positive");
    const ReducedBloch rb = reduced_bloch(s);
    const double den = 1.0 + nz * rb.z_A;
    if (den < tol::zero_probability)
        throw degenerate_outcome("zero-probability branch (1 + nz*z_A < 1e-14)");
    const double txx = 2.0 * (s.u + s.v);
    const double tzz = s.a - s.b - s.c + s.d;
    return SteeredOutcome{0.5 * t * den, txx * nx / den, (rb.z_B + tzz * nz) / den};
}

/// Check the POVM invariants: completeness sum t_i = 2 and sum t_i n_i = 0
/// (both within 1e-10), unit directions within 1e-12, positive weights.
/// Throws domain_error naming the violated invariant.
inline void validate_povm(const Povm& m) {
    double st = 0, sx = 0, sz = 0;
    for (const PovmElement& e : m.elements) {
        if (!(e.t > 0.0)) throw domain_error("povm element weight must be positive");
        if (std::abs(e.nx * e.nx + e.nz * e.nz - 1.0) > 1e-12)
            throw domain_error("povm element direction is not a unit vector");
        st += e.t;
        sx += e.t * e.nx;
        sz += e.t * e.nz;
    }
    if (std::abs(st - 2.0) > tol::povm_completeness)
        throw domain_error("povm weights do not sum to 2 (sum = " + std::to_string(st) + ")");
    if (std::abs(sx) > tol::povm_completeness || std::abs(sz) > tol::povm_completeness)
        throw domain_error("povm weighted directions do not sum to 0");
}

/// Average post-measurement entropy sum_i p_i h(|point_i|) of qubit B for a
/// complete measurement on qubit A.  The caller is responsible for POVM
/// validity (use validate_povm at trust boundaries).  Branches with
/// numerically zero probability contribute exactly 0 (their limit).
inline double conditional_entropy(const XState& s, const Povm& m) {
    const ReducedBloch rb = reduced_bloch(s);
    const double txx = 2.0 * (s.u + s.v);
    const double tzz = s.a - s.b - s.c + s.d;
    double total = 0.0;
    for (const PovmElement& e : m.elements) {
        const double den = 1.0 + e.nz * rb.z_A;
        if (den < tol::zero_probability) continue;  // p -> 0, p*h -> 0
        const double p = 0.5 * e.t * den;
        const double x = txx * e.nx / den;
        const double z = (rb.z_B + tzz * e.nz) / den;
        double r = std::sqrt(x * x + z * z);
        if (r > 1.0) {
            if (r > 1.0 + 1e-9) throw domain_error("steered point outside the Bloch ball");
            r = 1.0;
        }
        total += p * binary_entropy(r);
    }
    return total;
}

}  // namespace xqd
