#pragma once

/// \file curve.hpp
/// The horizontal-entropy curve S(z) = h(r(z)) on the vertical extent
/// [z_H, z_G] of a steering ellipse, where r(z) is the Bloch radius of the
/// boundary point at height z:
///   r(z)^2 = z^2 + l1^2 (1 - (z-z0)^2 / l3^2).
///
/// Internally everything is evaluated in the centered coordinate
/// zeta = z - z0, where
///   rho(zeta) = r^2 = (z0^2 + l1^2) + 2 z0 zeta + A zeta^2,
///   A = 1 - (l1/l3)^2,
/// so the quadratic coefficient A multiplies only zeta^2 <= l3^2.  The naive
/// form in z cancels catastrophically for thin curves far from the origin
/// (z and z0 nearly equal and both large); the centered form is exact at the
/// vertices and keeps finite-difference checks meaningful down to l3 ~ 1e-3.
///
/// Derivatives use h'(r) r'(z) rewritten through rho to stay finite at r = 0:
///   S'  = g(r) rho'/2,             g(r) = h'(r)/r = -atanh(r)/(r ln 2),
///   S'' = (rho'^2/4) w(r) + (rho''/2) g(r),   w(r) = (h''(r) - g(r))/r^2,
/// with Maclaurin series below r = 1e-4.  Both g and w are negative on
/// (0, 1), which gives the classification shortcut: A > 0 forces S'' < 0
/// (concave), so a convex stretch requires l1 >= l3.

#include <cmath>
#include <optional>
#include <string>

#include "xqd/core.hpp"
#include "xqd/errors.hpp"
#include "xqd/geometry.hpp"

namespace xqd {

/// Precomputed data of one horizontal-entropy curve.  Construct via
/// make_curve(); requires l3 above the degeneracy threshold (the flat case
/// has no curve — its decomposition is handled separately).
struct EntropyCurve {
    double l1 = 0, l3 = 0, z0 = 0;  ///< ellipse data
    double A = 0;                   ///< 1 - (l1/l3)^2, quadratic coefficient of rho
    double C0 = 0;                  ///< z0^2 + l1^2, rho at the center
    double z_G = 0, z_H = 0;        ///< domain endpoints z0 +- l3
    double S_G = 0, S_H = 0;        ///< endpoint entropies h(|z_G|), h(|z_H|)
};

inline EntropyCurve make_curve(double l1, double l3, double z0) {
    if (!(l3 >= tol::axis_degenerate))
        throw degenerate_ellipse("entropy curve undefined for flat ellipse (l3 < 1e-10)");
    if (!(l1 >= 0.0)) throw domain_error("l1 must be nonnegative");
    EntropyCurve c;
    c.l1 = l1;
    c.l3 = l3;
    c.z0 = z0;
    const double ratio = l1 / l3;
    c.A = 1.0 - ratio * ratio;
    c.C0 = z0 * z0 + l1 * l1;
    c.z_G = z0 + l3;
    c.z_H = z0 - l3;
    c.S_G = binary_entropy(std::min(std::abs(c.z_G), 1.0));
    c.S_H = binary_entropy(std::min(std::abs(c.z_H), 1.0));
    return c;
}

inline EntropyCurve make_curve(const SteeringEllipse& e) {
    return make_curve(e.l1, e.l3, e.z0);
}

namespace detail {

/// Domain check and conversion z -> zeta, clamped to [-l3, l3].
inline double zeta_of(const EntropyCurve& c, double z) {
    const double zeta = z - c.z0;
    if (std::abs(zeta) > c.l3 + 1e-12)
        throw domain_error("z = " + std::to_string(z) + " outside the curve domain [z_H, z_G]");
    return std::clamp(zeta, -c.l3, c.l3);
}

inline double rho_of_zeta(const EntropyCurve& c, double zeta) {
    return c.C0 + zeta * (2.0 * c.z0 + c.A * zeta);
}

inline double r_of_zeta(const EntropyCurve& c, double zeta) {
    double rho = rho_of_zeta(c, zeta);
    if (rho > 1.0 + 1e-12)
        throw domain_error("r(z)^2 = " + std::to_string(rho) + " exceeds 1: curve not physical");
    rho = std::clamp(rho, 0.0, 1.0);
    return std::sqrt(rho);
}

/// g(r) = h'(r)/r, finite at r = 0 (g(0) = -1/ln2); series below r = 1e-4.
inline double g_factor(double r) {
    if (r < 1e-4) {
        const double r2 = r * r;
        return -(1.0 + r2 / 3.0 + r2 * r2 / 5.0) / ln2;
    }
    return -std::atanh(r) / (r * ln2);
}

/// w(r) = (h''(r) - g(r))/r^2, finite at r = 0 (w(0) = -2/(3 ln2)).
inline double w_factor(double r) {
    if (r < 1e-4) {
        const double r2 = r * r;
        return -(2.0 / 3.0 + 0.8 * r2 + (6.0 / 7.0) * r2 * r2) / ln2;
    }
    const double hpp = -1.0 / ((1.0 - r * r) * ln2);
    return (hpp - g_factor(r)) / (r * r);
}

inline void require_regular(double r) {
    if (r >= 1.0 - tol::singular_r)
        throw singular_point("derivative requested at r = " + std::to_string(r) +
                             " (within 1e-9 of a pure state)");
}

inline double d1_zeta(const EntropyCurve& c, double zeta) {
    const double r = r_of_zeta(c, zeta);
    require_regular(r);
    const double rho_p = 2.0 * c.z0 + 2.0 * c.A * zeta;
    return 0.5 * g_factor(r) * rho_p;
}

inline double d2_zeta(const EntropyCurve& c, double zeta) {
    const double r = r_of_zeta(c, zeta);
    require_regular(r);
    const double rho_p = 2.0 * c.z0 + 2.0 * c.A * zeta;
    return 0.25 * rho_p * rho_p * w_factor(r) + c.A * g_factor(r);
}

}  // namespace detail

/// Bloch radius of the boundary point at height z; in [0, 1].
inline double r_of_z(const EntropyCurve& c, double z) {
    return detail::r_of_zeta(c, detail::zeta_of(c, z));
}

/// Average conditional entropy of the horizontal (two-outcome, boundary)
/// decomposition through height z: S(z) = h(r(z)).
inline double s_horizontal(const EntropyCurve& c, double z) {
    return binary_entropy(r_of_z(c, z));
}

/// First derivative of s_horizontal.  Throws singular_point within 1e-9 of
/// r = 1 (the entropy has a vertical tangent at pure states).
inline double s_horizontal_d1(const EntropyCurve& c, double z) {
    return detail::d1_zeta(c, detail::zeta_of(c, z));
}

/// Second derivative of s_horizontal; same singularity guard as d1.
inline double s_horizontal_d2(const EntropyCurve& c, double z) {
    return detail::d2_zeta(c, detail::zeta_of(c, z));
}

/// Average conditional entropy of the vertical (two-vertex) decomposition of
/// height z: the chord of the curve, p_G h(|z_G|) + p_H h(|z_H|) with
/// p_G = (z - z_H)/(z_G - z_H).
inline double s_vertical(const EntropyCurve& c, double z) {
    const double zeta = detail::zeta_of(c, z);
    const double p_G = 0.5 * (zeta + c.l3) / c.l3;
    return p_G * c.S_G + (1.0 - p_G) * c.S_H;
}

/// Horizontal-minus-vertical entropy gap; zero at both endpoints and with
/// the same convexity profile as the curve itself.
inline double delta(const EntropyCurve& c, double z) {
    return s_horizontal(c, z) - s_vertical(c, z);
}

enum class ConvexityTag { Convex, Concave, SingleInflection };

inline const char* to_string(ConvexityTag t) {
    switch (t) {
        case ConvexityTag::Convex: return "Convex";
        case ConvexityTag::Concave: return "Concave";
        case ConvexityTag::SingleInflection: return "SingleInflection";
    }
    return "?";
}

/// Result of the curvature scan; z_c is meaningful only for SingleInflection.
struct ConvexityClass {
    ConvexityTag tag = ConvexityTag::Convex;
    double z_c = 0;
};

/// Classify the curvature of the curve by sampling the analytic second
/// derivative at 1024 interior midpoints, skipping points within 1e-9 of the
/// r = 1 singularity and treating |d2| <= 1e-9 as indefinite.  Sign changes
/// between consecutive definite samples are refined by bisection to a zeta
/// interval of 1e-12.  Exactly one change yields SingleInflection with the
/// refined abscissa; none yields Convex or Concave (Convex when every sample
/// is indefinite — a constant-entropy curve).  Two or more persistent
/// changes indicate numerical trouble and raise curvature_violation: the
/// geometric method relies on at most one inflection existing.
inline ConvexityClass classify_convexity(const EntropyCurve& c) {
    constexpr int n = 1024;
    const double step = 2.0 * c.l3 / n;
    double min_d2 = 0.0, max_d2 = 0.0;
    bool any = false;
    // Consecutive definite samples: value and position of the last one.
    double prev_d2 = 0.0, prev_zeta = 0.0;
    bool have_prev = false;
    int crossings = 0;
    double lo = 0.0, hi = 0.0;  // bracket of the (single) refined crossing
    for (int i = 0; i < n; ++i) {
        const double zeta = -c.l3 + (i + 0.5) * step;
        const double r = detail::r_of_zeta(c, zeta);
        if (r >= 1.0 - tol::singular_r) continue;
        const double d2 = detail::d2_zeta(c, zeta);
        if (!any) {
            min_d2 = max_d2 = d2;
            any = true;
        } else {
            min_d2 = std::min(min_d2, d2);
            max_d2 = std::max(max_d2, d2);
        }
        if (std::abs(d2) <= tol::convexity) continue;  // indefinite sample
        if (have_prev && ((prev_d2 > 0) != (d2 > 0))) {
            ++crossings;
            if (crossings > 1)
                throw curvature_violation("second derivative changes sign more than once");
            lo = prev_zeta;
            hi = zeta;
        }
        prev_d2 = d2;
        prev_zeta = zeta;
        have_prev = true;
    }
    if (crossings == 0) {
        if (!any || min_d2 >= -tol::convexity) return {ConvexityTag::Convex, 0.0};
        if (max_d2 <= tol::convexity) return {ConvexityTag::Concave, 0.0};
        // Mixed signs without an adjacent definite pair cannot occur: the
        // crossing counter above pairs consecutive definite samples, so a
        // sign flip across indefinite gaps is still counted.  Defensive:
        throw curvature_violation("inconsistent curvature scan");
    }
    const bool rising = detail::d2_zeta(c, hi) > 0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double d2m = detail::d2_zeta(c, mid);
        if ((d2m > 0) == rising)
            hi = mid;
        else
            lo = mid;
    }
    return {ConvexityTag::SingleInflection, c.z0 + 0.5 * (lo + hi)};
}

/// Which endpoint anchors the tangent line.
enum class TangentEndpoint { Upper, Lower };

namespace detail {

/// Tangency residual F(zeta) = S'(zeta) - (S(zeta) - S_end)/(z - z_end):
/// zero exactly where the line from the endpoint touches the curve.
inline double tangent_residual_at(const EntropyCurve& c, double zeta, double zeta_end,
                                  double s_end) {
    const double s = binary_entropy(r_of_zeta(c, zeta));
    return d1_zeta(c, zeta) - (s - s_end) / (zeta - zeta_end);
}

}  // namespace detail

/// Solve for the interior tangency point z* of the line through an endpoint
/// of a single-inflection curve: d1(z*) = (S(z*) - S_end)/(z* - z_end).
/// The Upper solve anchors at (z_G, S_G) and brackets in (z_H, z_c); the
/// Lower solve anchors at (z_H, S_H) and brackets in (z_c, z_G).  Bracket
/// ends are nudged off the vertices (and away from any r = 1 singularity) by
/// geometric shrinking.  Returns the tangency abscissa with residual at most
/// 1e-10, or std::nullopt when the residual has one sign over the whole
/// bracket — then no tangent exists and the chord is already the lower
/// envelope.  Requires cls.tag == SingleInflection.
inline std::optional<double> tangent_from_endpoint(const EntropyCurve& c, TangentEndpoint which,
                                                   const ConvexityClass& cls) {
    if (cls.tag != ConvexityTag::SingleInflection)
        throw domain_error("tangent_from_endpoint requires a SingleInflection curve");
    const double span = 2.0 * c.l3;
    const double zeta_c = std::clamp(cls.z_c - c.z0, -c.l3, c.l3);
    const bool upper = (which == TangentEndpoint::Upper);
    const double zeta_end = upper ? c.l3 : -c.l3;
    const double s_end = upper ? c.S_G : c.S_H;

    // Free bracket end at the opposite vertex, nudged inward until off the
    // vertex and clear of the r = 1 singularity.
    double nudge = 1e-9 * span;
    double far = upper ? (-c.l3 + nudge) : (c.l3 - nudge);
    for (int guard = 0; guard < 200; ++guard) {
        const bool inside = upper ? (far < zeta_c) : (far > zeta_c);
        if (!inside) return std::nullopt;
        if (detail::r_of_zeta(c, far) < 1.0 - tol::singular_r) break;
        nudge *= 2.0;
        far = upper ? (-c.l3 + nudge) : (c.l3 - nudge);
    }
    if (detail::r_of_zeta(c, far) >= 1.0 - tol::singular_r) return std::nullopt;
    double near = zeta_c;
    if (detail::r_of_zeta(c, near) >= 1.0 - tol::singular_r) return std::nullopt;

    double f_far = detail::tangent_residual_at(c, far, zeta_end, s_end);
    double f_near = detail::tangent_residual_at(c, near, zeta_end, s_end);
    if ((f_far > 0) == (f_near > 0)) return std::nullopt;  // no tangent: chord is the envelope

    double lo = far, hi = near, f_lo = f_far;
    for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi));
         ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = detail::tangent_residual_at(c, mid, zeta_end, s_end);
        if (f_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((f_mid > 0) == (f_lo > 0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    const double zeta_star = 0.5 * (lo + hi);
    const double res = detail::tangent_residual_at(c, zeta_star, zeta_end, s_end);
    if (std::abs(res) > tol::tangent_residual)
        throw domain_error("tangent solve stalled with residual " + std::to_string(res));
    return c.z0 + zeta_star;
}

}  // namespace xqd
