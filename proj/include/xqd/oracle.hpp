#pragma once

/// \file oracle.hpp
/// Independent brute-force estimators of the minimal average conditional
/// entropy.  These deliberately avoid the geometric decision procedure so
/// that tests can cross-validate it:
///  - ensemble_oracle: lower convex hull of the sampled boundary-entropy
///    curve (pure geometry, no measurement operators);
///  - vonneumann_oracle: sweep of two-outcome projective measurements,
///    in-plane or over the full Bloch sphere;
///  - povm_oracle: grid-plus-refinement search over 3- or 4-element rank-1
///    planar measurements with weights solved from completeness.
/// Also hosts the seeded random-state generator used by audits and tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "xqd/core.hpp"
#include "xqd/curve.hpp"
#include "xqd/errors.hpp"
#include "xqd/geometry.hpp"

namespace xqd {

/// Outcome of a brute-force minimization.
struct OracleResult {
    double s_bar_min_estimate = 0;      ///< bits
    std::vector<WeightedPoint> support; ///< at most 4 ensemble members
    int grid_size = 0;                  ///< the N the estimate was run at
};

/// Minimal average entropy over ensembles of boundary points, by discretizing
/// the boundary at N+1 heights z_j = z0 - l3 + 2 l3 j/N (grids nest under
/// doubling of N) and taking the lower convex hull of (z_j, h(r(z_j))).
/// Because mirrored points (+x, -x) at one height pair into a zero-x average,
/// the 2D envelope problem is exactly this 1D hull.  The estimate is the hull
/// evaluated at z_B; the support reports the active hull vertices expanded
/// back to ellipse points with symmetric +-x weights.  Requires l3 above the
/// degeneracy threshold and N >= 64.
inline OracleResult ensemble_oracle(const SteeringEllipse& e, double z_B, int N) {
    if (e.l3 < tol::axis_degenerate)
        throw degenerate_ellipse("ensemble oracle needs vertical extent (l3 >= 1e-10)");
    if (N < 64) throw domain_error("ensemble oracle grid must have N >= 64");
    const EntropyCurve curve = make_curve(e.l1, e.l3, e.z0);
    const double zeta_B = z_B - e.z0;
    if (std::abs(zeta_B) > e.l3 + 1e-12)
        throw domain_error("z_B outside the vertical extent of the ellipse");

    struct Pt {
        double zeta, y;
    };
    std::vector<Pt> hull;
    hull.reserve(64);
    const auto cross = [](const Pt& o, const Pt& a, const Pt& b) {
        return (a.zeta - o.zeta) * (b.y - o.y) - (a.y - o.y) * (b.zeta - o.zeta);
    };
    for (int j = 0; j <= N; ++j) {
        // Pin the endpoints so the vertices enter the hull exactly.
        const double zeta = (j == N) ? e.l3 : -e.l3 + 2.0 * e.l3 * j / N;
        const Pt p{zeta, binary_entropy(detail::r_of_zeta(curve, zeta))};
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }

    // Locate the hull segment containing zeta_B and interpolate.
    std::size_t hi = 1;
    while (hi + 1 < hull.size() && hull[hi].zeta < zeta_B) ++hi;
    if (hull.size() == 1) hi = 0;
    OracleResult out;
    out.grid_size = N;
    const auto add_support = [&](double w, double zeta) {
        if (w < 1e-12) return;
        const double z = e.z0 + zeta;
        // Width from the grid coordinate itself: the endpoints carry
        // zeta = +-l3 exactly, so vertex support is a single point with
        // x = 0 exactly (recomputing from z would smear it by sqrt(ulp)).
        const double cz = std::clamp(zeta, -e.l3, e.l3);
        const double x = e.l1 * std::sqrt((e.l3 - cz) * (e.l3 + cz)) / e.l3;
        if (x > 1e-12) {
            out.support.push_back({0.5 * w, +x, z});
            out.support.push_back({0.5 * w, -x, z});
        } else {
            out.support.push_back({w, 0.0, z});
        }
    };
    if (hull.size() == 1) {
        out.s_bar_min_estimate = hull[0].y;
        add_support(1.0, hull[0].zeta);
        return out;
    }
    const Pt& lo_pt = hull[hi - 1];
    const Pt& hi_pt = hull[hi];
    const double lambda =
        std::clamp((zeta_B - lo_pt.zeta) / (hi_pt.zeta - lo_pt.zeta), 0.0, 1.0);
    out.s_bar_min_estimate = (1.0 - lambda) * lo_pt.y + lambda * hi_pt.y;
    add_support(1.0 - lambda, lo_pt.zeta);
    add_support(lambda, hi_pt.zeta);
    return out;
}

namespace detail {

/// Conditional entropy of the two-outcome projective measurement along the
/// (possibly out-of-plane) unit direction n.  Inlined rather than built from
/// Povm objects: the sweeps below evaluate this millions of times.
inline double projective_entropy(const XState& s, double nx, double ny, double nz) {
    const ReducedBloch rb = reduced_bloch(s);
    const double txx = 2.0 * (s.u + s.v);
    const double tyy = 2.0 * (s.v - s.u);
    const double tzz = s.a - s.b - s.c + s.d;
    double total = 0.0;
    for (int sign = +1; sign >= -1; sign -= 2) {
        const double den = 1.0 + sign * nz * rb.z_A;
        if (den < tol::zero_probability) continue;
        const double x = sign * txx * nx / den;
        const double y = sign * tyy * ny / den;
        const double z = (rb.z_B + sign * tzz * nz) / den;
        const double r = std::min(std::sqrt(x * x + y * y + z * z), 1.0);
        total += 0.5 * den * binary_entropy(r);
    }
    return total;
}

}  // namespace detail

/// Minimum conditional entropy over two-outcome projective measurements.
/// Planar sweep: N axes at angles theta_i = i pi / N from the z axis within
/// the x-z plane (i = 0 is the z axis; i = N/2 is the x axis when N is
/// even).  Full-sphere sweep: a ceil(sqrt(N)) x ceil(sqrt(N)) grid over the
/// polar angle in [0, pi] and azimuth in [0, pi) — it contains the x-z plane
/// (azimuth 0), so it can only probe beyond it.
inline double vonneumann_oracle(const XState& s, int N, bool full_sphere = false) {
    if (N < 2) throw domain_error("von Neumann sweep needs N >= 2");
    double best = 2.0;
    if (!full_sphere) {
        for (int i = 0; i < N; ++i) {
            const double theta = pi * i / N;
            best = std::min(best,
                            detail::projective_entropy(s, std::sin(theta), 0.0, std::cos(theta)));
        }
        return best;
    }
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(N))));
    const int n_theta = std::max(side, 3);
    const int n_phi = std::max(side, 3);
    for (int i = 0; i < n_theta; ++i) {
        const double theta = pi * i / (n_theta - 1);
        const double st = std::sin(theta), ct = std::cos(theta);
        for (int j = 0; j < n_phi; ++j) {
            const double phi = pi * j / n_phi;
            best = std::min(best,
                            detail::projective_entropy(s, st * std::cos(phi),
                                                       st * std::sin(phi), ct));
        }
    }
    return best;
}

namespace detail {

/// Per-direction data reused across weight solves in the POVM search.
struct PovmAngleData {
    double sin_t = 0, cos_t = 0;
    double den = 0;      ///< 1 + cos(theta) z_A
    double entropy = 0;  ///< h(r) of the steered point, 0 for a dead branch
};

inline PovmAngleData povm_angle_data(const XState& s, const ReducedBloch& rb, double txx,
                                     double tzz, double theta) {
    (void)s;
    PovmAngleData d;
    d.sin_t = std::sin(theta);
    d.cos_t = std::cos(theta);
    d.den = 1.0 + d.cos_t * rb.z_A;
    if (d.den >= tol::zero_probability) {
        const double x = txx * d.sin_t / d.den;
        const double z = (rb.z_B + tzz * d.cos_t) / d.den;
        d.entropy = binary_entropy(std::min(std::sqrt(x * x + z * z), 1.0));
    }
    return d;
}

/// Solve t1..t3 from sum t = 2, sum t sin = 0, sum t cos = 0 (Cramer).
/// Returns false when the directions are collinear or any weight is
/// nonpositive (infeasible triple, skipped by the search).
inline bool povm3_weights(const PovmAngleData& a, const PovmAngleData& b, const PovmAngleData& c,
                          std::array<double, 3>& t) {
    const double det = (b.sin_t * c.cos_t - c.sin_t * b.cos_t) -
                       (a.sin_t * c.cos_t - c.sin_t * a.cos_t) +
                       (a.sin_t * b.cos_t - b.sin_t * a.cos_t);
    if (std::abs(det) < 1e-12) return false;
    t[0] = 2.0 * (b.sin_t * c.cos_t - c.sin_t * b.cos_t) / det;
    t[1] = -2.0 * (a.sin_t * c.cos_t - c.sin_t * a.cos_t) / det;
    t[2] = 2.0 * (a.sin_t * b.cos_t - b.sin_t * a.cos_t) / det;
    return t[0] > 1e-12 && t[1] > 1e-12 && t[2] > 1e-12;
}

inline double povm3_value(const XState& s, const ReducedBloch& rb, double txx, double tzz,
                          const std::array<double, 3>& theta) {
    const PovmAngleData a = povm_angle_data(s, rb, txx, tzz, theta[0]);
    const PovmAngleData b = povm_angle_data(s, rb, txx, tzz, theta[1]);
    const PovmAngleData c = povm_angle_data(s, rb, txx, tzz, theta[2]);
    std::array<double, 3> t{};
    if (!povm3_weights(a, b, c, t)) return 2.0;
    return 0.5 * (t[0] * a.den * a.entropy + t[1] * b.den * b.entropy + t[2] * c.den * c.entropy);
}

/// Minimum over the one-parameter weight family of a 4-direction set.  The
/// completeness system has a one-dimensional solution space; the average
/// entropy is affine in the free parameter, so the minimum sits at an
/// endpoint of the feasibility interval (where one weight hits zero).
inline double povm4_value(const XState& s, const ReducedBloch& rb, double txx, double tzz,
                          const std::array<double, 4>& theta) {
    std::array<PovmAngleData, 4> d;
    for (int i = 0; i < 4; ++i) d[i] = povm_angle_data(s, rb, txx, tzz, theta[i]);
    // Nullspace of the 3x4 system [1; sin; cos] t = (2,0,0): signed 3x3 minors.
    const auto minor = [&](int skip) {
        std::array<int, 3> idx{};
        for (int i = 0, k = 0; i < 4; ++i)
            if (i != skip) idx[k++] = i;
        const PovmAngleData& p = d[idx[0]];
        const PovmAngleData& q = d[idx[1]];
        const PovmAngleData& r = d[idx[2]];
        return (q.sin_t * r.cos_t - r.sin_t * q.cos_t) -
               (p.sin_t * r.cos_t - r.sin_t * p.cos_t) +
               (p.sin_t * q.cos_t - q.sin_t * p.cos_t);
    };
    std::array<double, 4> null_dir{};
    double null_norm = 0.0;
    for (int i = 0; i < 4; ++i) {
        null_dir[i] = ((i % 2) ? -1.0 : 1.0) * minor(i);
        null_norm = std::max(null_norm, std::abs(null_dir[i]));
    }
    if (null_norm < 1e-14) return 2.0;  // degenerate direction set
    // Particular solution: zero one weight and solve the remaining 3x3.
    std::array<double, 4> part{};
    bool have_part = false;
    for (int skip = 3; skip >= 0 && !have_part; --skip) {
        std::array<int, 3> idx{};
        for (int i = 0, k = 0; i < 4; ++i)
            if (i != skip) idx[k++] = i;
        std::array<double, 3> t{};
        const double det = minor(skip);
        if (std::abs(det) < 1e-12) continue;
        const PovmAngleData& p = d[idx[0]];
        const PovmAngleData& q = d[idx[1]];
        const PovmAngleData& r = d[idx[2]];
        t[0] = 2.0 * (q.sin_t * r.cos_t - r.sin_t * q.cos_t) / det;
        t[1] = -2.0 * (p.sin_t * r.cos_t - r.sin_t * p.cos_t) / det;
        t[2] = 2.0 * (p.sin_t * q.cos_t - q.sin_t * p.cos_t) / det;
        part.fill(0.0);
        for (int k = 0; k < 3; ++k) part[idx[k]] = t[k];
        have_part = true;
    }
    if (!have_part) return 2.0;
    // Feasibility interval for t = part + lambda * null_dir, all t_i >= 0.
    double lo = -1e300, hi = 1e300;
    for (int i = 0; i < 4; ++i) {
        if (std::abs(null_dir[i]) < 1e-14) {
            if (part[i] < -1e-12) return 2.0;
            continue;
        }
        const double bound = -part[i] / null_dir[i];
        if (null_dir[i] > 0)
            lo = std::max(lo, bound);
        else
            hi = std::min(hi, bound);
    }
    if (lo > hi + 1e-15) return 2.0;
    double best = 2.0;
    for (const double lambda : {lo, hi}) {
        if (!std::isfinite(lambda)) continue;
        double value = 0.0;
        bool ok = true;
        for (int i = 0; i < 4; ++i) {
            const double t = part[i] + lambda * null_dir[i];
            if (t < -1e-9) {
                ok = false;
                break;
            }
            if (t > 0.0) value += 0.5 * t * d[i].den * d[i].entropy;
        }
        if (ok) best = std::min(best, value);
    }
    return best;
}

/// Greedy coordinate pattern search over element angles, halving the step
/// from `step0` down to 1e-9.  Evaluate is value(theta-array).
template <std::size_t K, class Eval>
inline double pattern_search(std::array<double, K>& theta, double step0, const Eval& value) {
    double best = value(theta);
    double step = step0;
    while (step > 1e-9) {
        bool improved = false;
        for (std::size_t i = 0; i < K; ++i) {
            for (const double delta : {+step, -step}) {
                std::array<double, K> trial = theta;
                trial[i] += delta;
                const double v = value(trial);
                if (v < best - 1e-15) {
                    best = v;
                    theta = trial;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

}  // namespace detail

/// Minimum conditional entropy over planar rank-1 POVMs with 3 or 4
/// elements.  Directions are drawn from a `resolution`-point angle grid over
/// [0, 2 pi); weights are solved from the completeness constraints (sum t =
/// 2, sum t n = 0) and direction sets with any nonpositive weight are
/// infeasible and skipped.  The best few grid candidates are polished by a
/// halving-step pattern search, so with the geometric optimum inside the
/// search space the result is accurate to ~1e-9 rather than grid resolution.
inline double povm_oracle(const XState& s, int n_elements, int resolution) {
    if (n_elements != 3 && n_elements != 4)
        throw domain_error("povm oracle supports 3 or 4 elements");
    if (resolution < 8) throw domain_error("povm oracle resolution must be >= 8");
    const ReducedBloch rb = reduced_bloch(s);
    const double txx = 2.0 * (s.u + s.v);
    const double tzz = s.a - s.b - s.c + s.d;
    const int R = resolution;
    std::vector<double> grid(R);
    for (int i = 0; i < R; ++i) grid[i] = 2.0 * pi * i / R;

    if (n_elements == 3) {
        const auto value = [&](const std::array<double, 3>& th) {
            return detail::povm3_value(s, rb, txx, tzz, th);
        };
        // Keep the best three grid triples as refinement seeds.
        std::vector<std::pair<double, std::array<double, 3>>> seeds;
        for (int i = 0; i < R; ++i)
            for (int j = i + 1; j < R; ++j)
                for (int k = j + 1; k < R; ++k) {
                    const std::array<double, 3> th{grid[i], grid[j], grid[k]};
                    const double v = value(th);
                    if (seeds.size() < 3) {
                        seeds.emplace_back(v, th);
                        std::sort(seeds.begin(), seeds.end(),
                                  [](const auto& a, const auto& b) { return a.first < b.first; });
                    } else if (v < seeds.back().first) {
                        seeds.back() = {v, th};
                        std::sort(seeds.begin(), seeds.end(),
                                  [](const auto& a, const auto& b) { return a.first < b.first; });
                    }
                }
        double best = 2.0;
        for (auto& [v0, th] : seeds) {
            std::array<double, 3> theta = th;
            best = std::min(best, detail::pattern_search(theta, 2.0 * pi / R, value));
        }
        return best;
    }

    const auto value = [&](const std::array<double, 4>& th) {
        return detail::povm4_value(s, rb, txx, tzz, th);
    };
    std::vector<std::pair<double, std::array<double, 4>>> seeds;
    for (int i = 0; i < R; ++i)
        for (int j = i + 1; j < R; ++j)
            for (int k = j + 1; k < R; ++k)
                for (int l = k + 1; l < R; ++l) {
                    const std::array<double, 4> th{grid[i], grid[j], grid[k], grid[l]};
                    const double v = value(th);
                    if (seeds.size() < 2) {
                        seeds.emplace_back(v, th);
                        std::sort(seeds.begin(), seeds.end(),
                                  [](const auto& a, const auto& b) { return a.first < b.first; });
                    } else if (v < seeds.back().first) {
                        seeds.back() = {v, th};
                        std::sort(seeds.begin(), seeds.end(),
                                  [](const auto& a, const auto& b) { return a.first < b.first; });
                    }
                }
    double best = 2.0;
    for (auto& [v0, th] : seeds) {
        std::array<double, 4> theta = th;
        best = std::min(best, detail::pattern_search(theta, 2.0 * pi / R, value));
    }
    return best;
}

/// Deterministic uniform double in [0, 1) from the top 53 bits of the
/// engine's output; avoids std::uniform_real_distribution, whose output is
/// not specified bit-for-bit across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random valid X state: diagonal uniform on the probability simplex (four
/// unit exponentials, normalized), coherences u = s1 sqrt(ad), v = s2
/// sqrt(bc) with s1, s2 uniform on [0, 1] — valid by construction.
inline XState random_xstate(std::mt19937_64& rng) {
    std::array<double, 4> w{};
    double sum = 0.0;
    for (double& x : w) {
        x = -std::log(1.0 - uniform01(rng));
        sum += x;
    }
    for (double& x : w) x /= sum;
    const double s1 = uniform01(rng);
    const double s2 = uniform01(rng);
    const double u = s1 * std::sqrt(w[0] * w[3]);
    const double v = s2 * std::sqrt(w[1] * w[2]);
    return validate_xstate(w[0], w[1], w[2], w[3], u, v);
}

/// Engine for the i-th draw of a seeded batch: mixes the index into the seed
/// so batch items can be generated independently (and in parallel) while
/// remaining reproducible.
inline std::mt19937_64 batch_engine(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

}  // namespace xqd
