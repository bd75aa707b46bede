#include <catch2/catch_amalgamated.hpp>

#include <xqd/core.hpp>
#include <xqd/curve.hpp>
#include <xqd/geometry.hpp>
#include <xqd/oracle.hpp>

#include "support/fixtures.hpp"

#include <cmath>
#include <random>

using Catch::Matchers::WithinAbs;
using namespace xqd;

namespace {
EntropyCurve family_curve(double k) {
    return make_curve(ellipse_from_xstate(xqd_test::family_state(k)));
}
}  // namespace

TEST_CASE("make_curve caches geometry and endpoint entropies") {
    const EntropyCurve c = family_curve(0.2839);
    REQUIRE_THAT(c.z_G, WithinAbs(0.6862055980921300, 1e-12));
    REQUIRE_THAT(c.z_H, WithinAbs(0.2297097884899164, 1e-12));
    REQUIRE_THAT(c.S_G, WithinAbs(0.6268347295805381, 1e-12));
    REQUIRE_THAT(c.S_H, WithinAbs(0.9615949386958409, 1e-12));
    REQUIRE_THROWS_AS(make_curve(0.5, 0.0, 0.2), degenerate_ellipse);
    REQUIRE_THROWS_AS(make_curve(-0.1, 0.2, 0.0), domain_error);
}

TEST_CASE("r_of_z: pinned value, vertices, unit circle") {
    const EntropyCurve c = family_curve(0.2839);
    const double z_B = 0.5934;
    REQUIRE_THAT(r_of_z(c, z_B), WithinAbs(0.6265790687252574, 1e-12));
    REQUIRE_THAT(r_of_z(c, c.z_G), WithinAbs(std::abs(c.z_G), 1e-14));
    REQUIRE_THAT(r_of_z(c, c.z_H), WithinAbs(std::abs(c.z_H), 1e-14));
    REQUIRE_THROWS_AS(r_of_z(c, c.z_G + 1e-6), domain_error);

    const EntropyCurve bell = make_curve(1.0, 1.0, 0.0);
    for (double z : {-1.0, -0.5, 0.0, 0.3, 1.0})
        REQUIRE_THAT(r_of_z(bell, z), WithinAbs(1.0, 1e-14));
}

TEST_CASE("s_horizontal and s_vertical: pinned values at the family marginal") {
    const EntropyCurve c = family_curve(0.2839);
    const double z_B = 0.5934;
    REQUIRE_THAT(s_horizontal(c, z_B), WithinAbs(0.6945390633441539, 1e-12));
    REQUIRE_THAT(s_vertical(c, z_B), WithinAbs(0.6948914800936792, 1e-12));
    REQUIRE_THAT(delta(c, z_B),
                 WithinAbs(0.6945390633441539 - 0.6948914800936792, 1e-12));

    // The chord weight at z_B is the upper block mass m = a + b = 0.7967.
    const double p_G = (z_B - c.z_H) / (c.z_G - c.z_H);
    REQUIRE_THAT(p_G, WithinAbs(0.7967, 1e-12));
    REQUIRE_THAT(s_vertical(c, z_B), WithinAbs(p_G * c.S_G + (1 - p_G) * c.S_H, 1e-15));

    // The gap closes at the vertices.
    REQUIRE_THAT(delta(c, c.z_G), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(delta(c, c.z_H), WithinAbs(0.0, 1e-12));
}

TEST_CASE("derivatives: symmetry, signs, and the singular guard") {
    SECTION("centered curve has zero slope at the center") {
        // Oblate (l1 > l3): the steered state is purest at the equator, so
        // the entropy has a valley there and the curve is convex at z = 0.
        const EntropyCurve sym = make_curve(0.6, 0.2, 0.0);
        REQUIRE(s_horizontal_d1(sym, 0.0) == 0.0);
        REQUIRE(s_horizontal_d2(sym, 0.0) > 0.0);
        // Prolate (l1 < l3): purest at the poles, entropy peaks at center.
        const EntropyCurve tall = make_curve(0.2, 0.6, 0.0);
        REQUIRE(s_horizontal_d1(tall, 0.0) == 0.0);
        REQUIRE(s_horizontal_d2(tall, 0.0) < 0.0);
    }
    SECTION("convex family curve has positive curvature throughout") {
        const EntropyCurve c = family_curve(0.2839);
        for (int i = 1; i < 50; ++i) {
            const double z = c.z_H + (c.z_G - c.z_H) * i / 50.0;
            REQUIRE(s_horizontal_d2(c, z) > 0.0);
        }
    }
    SECTION("concave family curve has negative curvature throughout") {
        const EntropyCurve c = family_curve(0.2805);
        for (int i = 1; i < 50; ++i) {
            const double z = c.z_H + (c.z_G - c.z_H) * i / 50.0;
            REQUIRE(s_horizontal_d2(c, z) < 0.0);
        }
    }
    SECTION("derivatives are refused within 1e-9 of a pure steered state") {
        const EntropyCurve bell = make_curve(1.0, 1.0, 0.0);
        REQUIRE_THROWS_AS(s_horizontal_d1(bell, 0.0), singular_point);
        REQUIRE_THROWS_AS(s_horizontal_d2(bell, 0.5), singular_point);
        REQUIRE(s_horizontal(bell, 0.5) == 0.0);  // the value itself is fine
    }
}

TEST_CASE("analytic derivatives match central differences") {
    // Design: 200 curves with l3 >= 1e-3, 100 sample points each, fourth-order
    // (five-point) central stencils, relative tolerance 1e-6 with an absolute
    // floor of 1 (the entropy scale).  No fixed step works across this family
    // in double precision: stiff near-pure regions need a tiny step to control
    // truncation, while on gentle curves the same step leaves the second
    // difference at the roundoff floor.  The step is therefore sized per point
    // from the local distance to purity and the curve's stiffness bounds, and
    // the second-derivative comparison is floored by the magnitude of its two
    // constituent terms: where they nearly cancel, only term-relative accuracy
    // is representable.  Stencils touching r > 1 - 1e-2 are skipped, as are
    // slivers at the vertices whose admissible step underflows the roundoff
    // floor; the tally guard keeps the skips honest.
    int kept = 0;
    for (int i = 0; i < 200; ++i) {
        std::mt19937_64 rng = batch_engine(5150, i);
        const EntropyCurve c = xqd_test::random_curve(rng, 1e-3);
        const double slope_bound =
            std::max(1.0, 2.0 * (std::abs(c.z0) + std::abs(c.A) * c.l3));
        const double stiffness = std::max(1.0, std::abs(c.A));
        for (int j = 0; j < 100; ++j) {
            const double zeta = (2.0 * uniform01(rng) - 1.0) * 0.98 * c.l3;
            const double rho = detail::rho_of_zeta(c, zeta);
            const double r = std::sqrt(std::min(1.0, rho));
            if (r > 1.0 - 1e-2) continue;
            const double u = 1.0 - rho;
            const double slope_half = c.z0 + c.A * zeta;  // rho'(zeta)/2
            const double term_scale =
                std::abs(detail::w_factor(r)) * slope_half * slope_half +
                std::abs(c.A * detail::g_factor(r));
            double h = std::min(0.0075 * u / slope_bound,
                                0.02 * std::sqrt(u / stiffness));
            h = std::min(h, (c.l3 - std::abs(zeta)) / 2.2);
            if (h < 3e-5 / std::sqrt(std::max(1.0, term_scale))) continue;
            bool near_pure = false;
            for (double dz : {-2.0 * h, -h, 0.0, +h, +2.0 * h})
                if (detail::r_of_zeta(c, zeta + dz) > 1.0 - 1e-2) near_pure = true;
            if (near_pure) continue;
            const double z = c.z0 + zeta;
            const double s_m2 = s_horizontal(c, z - 2.0 * h);
            const double s_m1 = s_horizontal(c, z - h);
            const double s_0 = s_horizontal(c, z);
            const double s_p1 = s_horizontal(c, z + h);
            const double s_p2 = s_horizontal(c, z + 2.0 * h);
            const double fd1 =
                (-s_p2 + 8.0 * s_p1 - 8.0 * s_m1 + s_m2) / (12.0 * h);
            const double fd2 =
                (-s_p2 + 16.0 * s_p1 - 30.0 * s_0 + 16.0 * s_m1 - s_m2) /
                (12.0 * h * h);
            const double a1 = s_horizontal_d1(c, z);
            const double a2 = s_horizontal_d2(c, z);
            REQUIRE(std::abs(fd1 - a1) <= 1e-6 * std::max(1.0, std::abs(a1)));
            REQUIRE(std::abs(fd2 - a2) <=
                    1e-6 * std::max({1.0, std::abs(a2), term_scale}));
            ++kept;
        }
    }
    REQUIRE(kept > 15000);  // the filters must not consume the sample
}

TEST_CASE("classify_convexity walks Convex -> SingleInflection -> Concave") {
    const ConvexityClass c1 = classify_convexity(family_curve(0.2839));
    REQUIRE(c1.tag == ConvexityTag::Convex);

    const ConvexityClass c2 = classify_convexity(family_curve(0.2827));
    REQUIRE(c2.tag == ConvexityTag::SingleInflection);
    REQUIRE_THAT(c2.z_c, WithinAbs(0.5584557755308877, 1e-9));

    const ConvexityClass c3 = classify_convexity(family_curve(0.2822));
    REQUIRE(c3.tag == ConvexityTag::SingleInflection);
    REQUIRE_THAT(c3.z_c, WithinAbs(0.4807139630774544, 1e-9));

    const ConvexityClass c4 = classify_convexity(family_curve(0.2817));
    REQUIRE(c4.tag == ConvexityTag::SingleInflection);
    REQUIRE_THAT(c4.z_c, WithinAbs(0.39838694548636566, 1e-9));

    const ConvexityClass c5 = classify_convexity(family_curve(0.2805));
    REQUIRE(c5.tag == ConvexityTag::Concave);
}

TEST_CASE("classify_convexity handles the all-singular circle") {
    // Unit circle: every sample sits at r = 1, so no curvature sample exists;
    // the curve is the constant 0, reported as (trivially) convex.
    const ConvexityClass c = classify_convexity(make_curve(1.0, 1.0, 0.0));
    REQUIRE(c.tag == ConvexityTag::Convex);
}

TEST_CASE("sufficient conditions pin the classification") {
    SECTION("wide ellipses (l1 dominating) are convex") {
        // u+v >= |sqrt(ad) - sqrt(bc)| implies l1 >= l3, hence S'' > 0.
        int found = 0;
        for (int i = 0; found < 500 && i < 100000; ++i) {
            std::mt19937_64 rng = batch_engine(901, i);
            const XState s = random_xstate(rng);
            if (s.u + s.v <
                std::abs(std::sqrt(s.a * s.d) - std::sqrt(s.b * s.c)))
                continue;
            const SteeringEllipse e = ellipse_from_xstate(s);
            if (e.l3 < 1e-6) continue;
            ++found;
            REQUIRE(classify_convexity(make_curve(e)).tag == ConvexityTag::Convex);
        }
        REQUIRE(found == 500);
    }
    SECTION("tall ellipses pinned by (u+v)^2 <= (a-b)(d-c) are concave") {
        int found = 0;
        for (int i = 0; found < 500 && i < 400000; ++i) {
            std::mt19937_64 rng = batch_engine(902, i);
            const XState s = random_xstate(rng);
            if ((s.u + s.v) * (s.u + s.v) > (s.a - s.b) * (s.d - s.c)) continue;
            const SteeringEllipse e = ellipse_from_xstate(s);
            if (e.l3 < 1e-6) continue;
            ++found;
            REQUIRE(classify_convexity(make_curve(e)).tag == ConvexityTag::Concave);
        }
        REQUIRE(found == 500);
    }
    SECTION("centered curves never have an interior inflection") {
        int found = 0;
        for (int i = 0; found < 500 && i < 100000; ++i) {
            std::mt19937_64 rng = batch_engine(903, i);
            const XState s = xqd_test::random_centered_state(rng);
            const SteeringEllipse e = ellipse_from_xstate(s);
            if (e.l3 < 1e-6 || e.l1 < 1e-6) continue;
            if (std::abs(e.l1 / e.l3 - 1.0) < 1e-6) continue;  // circle boundary case
            ++found;
            const ConvexityTag tag = classify_convexity(make_curve(e)).tag;
            if (e.l1 > e.l3)
                REQUIRE(tag == ConvexityTag::Convex);
            else
                REQUIRE(tag == ConvexityTag::Concave);
        }
        REQUIRE(found == 500);
    }
}

TEST_CASE("tangent_from_endpoint: pinned tangency for the triangle regime") {
    const EntropyCurve c = family_curve(0.2822);
    const ConvexityClass cls = classify_convexity(c);
    REQUIRE(cls.tag == ConvexityTag::SingleInflection);

    const auto z_star = tangent_from_endpoint(c, TangentEndpoint::Upper, cls);
    REQUIRE(z_star.has_value());
    REQUIRE_THAT(*z_star, WithinAbs(0.3634375105903176, 1e-9));

    // Independent residual check: the line through (z_G, S_G) really is
    // tangent at z*.
    const double slope = (s_horizontal(c, *z_star) - c.S_G) / (*z_star - c.z_G);
    REQUIRE_THAT(s_horizontal_d1(c, *z_star), WithinAbs(slope, 1e-10));
    // Tangency in the convex part: the touch is a true support point.
    REQUIRE(s_horizontal_d2(c, *z_star) > 0.0);
    REQUIRE(*z_star < cls.z_c);

    // The tangent line undercuts both candidate decompositions strictly
    // between z* and the vertex.
    for (int j = 1; j <= 5; ++j) {
        const double z_B = *z_star + (c.z_G - *z_star) * j / 6.0;
        const double line = c.S_G + slope * (z_B - c.z_G);
        REQUIRE(line < s_horizontal(c, z_B));
        REQUIRE(line < s_vertical(c, z_B));
    }
}

TEST_CASE("tangent_from_endpoint: absent tangent reported as such") {
    const EntropyCurve c = family_curve(0.2817);
    const ConvexityClass cls = classify_convexity(c);
    REQUIRE(cls.tag == ConvexityTag::SingleInflection);
    REQUIRE_FALSE(tangent_from_endpoint(c, TangentEndpoint::Upper, cls).has_value());
}

TEST_CASE("tangent_from_endpoint requires a single-inflection curve") {
    const EntropyCurve c = family_curve(0.2839);
    const ConvexityClass cls = classify_convexity(c);
    REQUIRE_THROWS_AS(tangent_from_endpoint(c, TangentEndpoint::Upper, cls), domain_error);
}

TEST_CASE("curvature scan is stable over random curves") {
    for (int i = 0; i < 2000; ++i) {
        std::mt19937_64 rng = batch_engine(904, i);
        const EntropyCurve c = xqd_test::random_curve(rng, 1e-8);
        REQUIRE_NOTHROW(classify_convexity(c));
    }
}
