#pragma once

// Shared fixture states and samplers for the test suite.

#include <xqd/core.hpp>
#include <xqd/curve.hpp>
#include <xqd/geometry.hpp>
#include <xqd/oracle.hpp>

#include <cmath>
#include <random>

namespace xqd_test {

/// One-parameter family used throughout the tests: fixed diagonal, coherences
/// scaled as u = k*sqrt(a*d), v = k*sqrt(b*c).  Sweeping k walks the optimal
/// measurement through vertical -> three-element -> horizontal.
inline xqd::XState family_state(double k) {
    const double a = 0.6717, b = 0.125, c = 0.125, d = 0.0783;
    return xqd::validate_xstate(a, b, c, d, k * std::sqrt(a * d), k * std::sqrt(b * c));
}

/// State whose optimal measurement is a genuine three-element POVM.
inline xqd::XState triangle_state() {
    return xqd::validate_xstate(0.6717, 0.125, 0.125, 0.0783, 0.0, 0.1);
}

inline xqd::XState bell_state() { return xqd::validate_xstate(0.5, 0.0, 0.0, 0.5, 0.5, 0.0); }

inline xqd::XState maximally_mixed() {
    return xqd::validate_xstate(0.25, 0.25, 0.25, 0.25, 0.0, 0.0);
}

/// Random state whose steering ellipse has a usable vertical extent, for
/// numerical work that divides by l3.
inline xqd::XState random_fat_state(std::mt19937_64& rng, double min_l3 = 1e-3) {
    for (;;) {
        const xqd::XState s = xqd::random_xstate(rng);
        const xqd::SteeringEllipse e = xqd::ellipse_from_xstate(s);
        if (e.degeneracy == xqd::Degeneracy::Point) continue;
        if (e.l3 >= min_l3) return s;
    }
}

/// Random state conditioned to have ac = bd, i.e. a vertically centred
/// steering ellipse (z0 = 0 up to rounding).
inline xqd::XState random_centered_state(std::mt19937_64& rng) {
    for (;;) {
        double a = -std::log(xqd::uniform01(rng));
        double b = -std::log(xqd::uniform01(rng));
        double c = -std::log(xqd::uniform01(rng));
        double d = a * c / b;
        const double t = a + b + c + d;
        a /= t;
        b /= t;
        c /= t;
        d /= t;
        const double u = xqd::uniform01(rng) * std::sqrt(a * d);
        const double v = xqd::uniform01(rng) * std::sqrt(b * c);
        try {
            return xqd::validate_xstate(a, b, c, d, u, v);
        } catch (const xqd::error&) {
            continue;  // rare boundary rounding
        }
    }
}

/// Random curve (l3 bounded below) drawn from random states.
inline xqd::EntropyCurve random_curve(std::mt19937_64& rng, double min_l3 = 1e-3) {
    return xqd::make_curve(xqd::ellipse_from_xstate(random_fat_state(rng, min_l3)));
}

}  // namespace xqd_test
