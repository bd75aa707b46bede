#pragma once

/// \file geometry.hpp
/// Steering-ellipse geometry for two-qubit X states.
///
/// Rank-1 measurements on qubit A steer qubit B onto an ellipse in the x-z
/// plane of its Bloch ball.  With m = a+b and q = c+d the ellipse has
/// semi-axes and center
///   l1 = (u+v)/sqrt(mq),   l2 = |u-v|/sqrt(mq),
///   l3 = |ad-bc|/(mq),     z0 = (ac-bd)/(mq),
/// vertical extent [z_H, z_G] = [z0-l3, z0+l3].  The ellipse (together with
/// the marginal point z_B) is the entire input to the discord optimization;
/// many states share one ellipse, differing only in z_B.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "xqd/core.hpp"
#include "xqd/errors.hpp"

namespace xqd {

/// Degenerate shapes of the steering ellipse (threshold tol::axis_degenerate
/// per semi-axis).
enum class Degeneracy {
    Full,     ///< all semi-axes nonzero
    FlatY,    ///< l2 = 0: u = v (ellipse still full in the x-z plane)
    FlatZ,    ///< l3 = 0: ad = bc; horizontal segment at height z0
    Segment,  ///< l1 = 0: u = v = 0; vertical segment [z_H, z_G]
    Point,    ///< l1 = l3 = 0: steering set is the single point (0, z_B)
};

inline const char* to_string(Degeneracy d) {
    switch (d) {
        case Degeneracy::Full: return "Full";
        case Degeneracy::FlatY: return "FlatY";
        case Degeneracy::FlatZ: return "FlatZ";
        case Degeneracy::Segment: return "Segment";
        case Degeneracy::Point: return "Point";
    }
    return "?";
}

/// Steering ellipse of an X state plus the two marginal z-coordinates.
struct SteeringEllipse {
    double l1 = 0;  ///< horizontal semi-axis
    double l2 = 0;  ///< out-of-plane semi-axis (stored, never optimized over)
    double l3 = 0;  ///< vertical semi-axis
    double z0 = 0;  ///< center height
    double z_A = 0; ///< Bloch z of qubit A (enters steering probabilities)
    double z_B = 0; ///< Bloch z of qubit B (the point to decompose)
    double z_G = 0; ///< upper vertex z0 + l3
    double z_H = 0; ///< lower vertex z0 - l3
    Degeneracy degeneracy = Degeneracy::Full;
};

namespace detail {
inline Degeneracy classify_degeneracy(double l1, double l2, double l3) {
    const bool flat1 = l1 < tol::axis_degenerate;
    const bool flat2 = l2 < tol::axis_degenerate;
    const bool flat3 = l3 < tol::axis_degenerate;
    if (flat1 && flat3) return Degeneracy::Point;
    if (flat1) return Degeneracy::Segment;
    if (flat3) return Degeneracy::FlatZ;
    if (flat2) return Degeneracy::FlatY;
    return Degeneracy::Full;
}
}  // namespace detail

/// Build the steering ellipse of a valid X state.  When one marginal block
/// is empty (m or q = 0) qubit A is pure and nothing can be steered: the
/// result is the Point ellipse at (0, z_B).
inline SteeringEllipse ellipse_from_xstate(const XState& s) {
    const ReducedBloch rb = reduced_bloch(s);
    const double m = s.a + s.b;
    const double q = s.c + s.d;
    SteeringEllipse e;
    e.z_A = rb.z_A;
    e.z_B = rb.z_B;
    if (m < 1e-14 || q < 1e-14) {
        e.l1 = e.l2 = e.l3 = 0.0;
        e.z0 = rb.z_B;
        e.z_G = e.z_H = e.z0;
        e.degeneracy = Degeneracy::Point;
        return e;
    }
    const double mq = m * q;
    const double smq = std::sqrt(mq);
    e.l1 = (s.u + s.v) / smq;
    e.l2 = std::abs(s.u - s.v) / smq;
    e.l3 = std::abs(s.a * s.d - s.b * s.c) / mq;
    e.z0 = (s.a * s.c - s.b * s.d) / mq;
    e.z_G = e.z0 + e.l3;
    e.z_H = e.z0 - e.l3;
    e.degeneracy = detail::classify_degeneracy(e.l1, e.l2, e.l3);
    return e;
}

/// Boundary abscissa x(z) = l1 sqrt(1 - (z-z0)^2/l3^2) for z in [z_H, z_G]
/// (zero at the vertices).  Evaluated as l1 sqrt((l3-zeta)(l3+zeta))/l3 with
/// zeta = z - z0, which is exact at the endpoints.  For a flat (l3 = 0)
/// ellipse the only admissible z is z0, where the boundary half-width is l1.
/// Throws domain_error when z is outside the vertical extent by more than
/// 1e-12.
inline double x_on_ellipse(const SteeringEllipse& e, double z) {
    const double zeta = z - e.z0;
    if (std::abs(zeta) > e.l3 + 1e-12)
        throw domain_error("z = " + std::to_string(z) + " outside [z_H, z_G]");
    if (e.l3 < tol::axis_degenerate) return e.l1;
    const double c = std::clamp(zeta, -e.l3, e.l3);
    return e.l1 * std::sqrt((e.l3 - c) * (e.l3 + c)) / e.l3;
}

/// Solve the inverse problem: all X states (up to the discrete branch
/// choices) whose steering ellipse is (l1, l2, l3, z0) and whose qubit-B
/// marginal is z_B.  Closed form: the vertex heights equal (a-b)/m and
/// (c-d)/q in one order or the other (branch s = sign(ad-bc)), and
/// z_B = m (a-b)/m + q (c-d)/q fixes the block masses.  Coherences follow
/// from u+v = l1 sqrt(mq), |u-v| = l2 sqrt(mq) (two assignments when
/// l2 > 0).  Candidates are validated and round-trip checked against the
/// requested ellipse within 1e-8; distinct survivors are returned (up to
/// four).  Throws no_solution when the target is infeasible, and
/// inversion_failed if a candidate validates but fails the round-trip.
inline std::vector<XState> xstate_from_ellipse(double l1, double l2, double l3, double z0,
                                               double z_B) {
    if (!(l1 >= 0 && l2 >= 0 && l3 >= 0))
        throw domain_error("semi-axes must be nonnegative");
    if (l2 > l1 + 1e-12)
        throw no_solution("l2 > l1 is unreachable (|u-v| <= u+v)");
    if (l3 < tol::axis_degenerate)
        throw no_solution("flat target (l3 < 1e-10): the block masses are underdetermined");
    if (std::abs(z_B - z0) > l3 + 1e-12)
        throw no_solution("(0, z_B) lies outside the vertical extent of the ellipse");

    std::vector<XState> out;
    for (int s = +1; s >= -1; s -= 2) {
        const double zg = z0 + s * l3;  // candidate (a-b)/m
        const double zh = z0 - s * l3;  // candidate (c-d)/q
        const double m = 0.5 * (1.0 + (z_B - z0) / (s * l3));
        const double q = 1.0 - m;
        if (!(m > 1e-14 && q > 1e-14)) continue;
        const double a = 0.5 * m * (1.0 + zg);
        const double b = 0.5 * m * (1.0 - zg);
        const double c = 0.5 * q * (1.0 + zh);
        const double d = 0.5 * q * (1.0 - zh);
        if (a < -tol::validation || b < -tol::validation || c < -tol::validation ||
            d < -tol::validation)
            continue;
        const double smq = std::sqrt(m * q);
        const double hi = 0.5 * (l1 + l2) * smq;
        const double lo = 0.5 * (l1 - l2) * smq;
        const int assignments = (l2 > 1e-14) ? 2 : 1;
        for (int k = 0; k < assignments; ++k) {
            const double u = (k == 0) ? hi : lo;
            const double v = (k == 0) ? lo : hi;
            XState cand;
            try {
                cand = validate_xstate(std::max(a, 0.0), std::max(b, 0.0), std::max(c, 0.0),
                                       std::max(d, 0.0), u, v);
            } catch (const validation_error&) {
                continue;
            }
            const SteeringEllipse back = ellipse_from_xstate(cand);
            const double rt = std::max({std::abs(back.l1 - l1), std::abs(back.l2 - l2),
                                        std::abs(back.l3 - l3), std::abs(back.z0 - z0),
                                        std::abs(back.z_B - z_B)});
            if (rt > 1e-8)
                throw inversion_failed("round-trip residual " + std::to_string(rt) +
                                       " exceeds 1e-8");
            const bool dup = std::any_of(out.begin(), out.end(), [&](const XState& o) {
                return std::abs(o.a - cand.a) < 1e-12 && std::abs(o.b - cand.b) < 1e-12 &&
                       std::abs(o.c - cand.c) < 1e-12 && std::abs(o.d - cand.d) < 1e-12 &&
                       std::abs(o.u - cand.u) < 1e-12 && std::abs(o.v - cand.v) < 1e-12;
            });
            if (!dup) out.push_back(cand);
        }
    }
    if (out.empty())
        throw no_solution("no physical X state realizes the requested ellipse and marginal");
    return out;
}

}  // namespace xqd
