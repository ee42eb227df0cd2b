#pragma once

// Matrix pairs with prescribed trace coordinates, and samplers for the
// fibers of the lifted commutator.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "onehole/character.hpp"
#include "onehole/cover.hpp"
#include "onehole/error.hpp"
#include "onehole/mobius.hpp"
#include "onehole/twist.hpp"

namespace onehole {

/// Real roots of z^2 - xy z + (x^2 + y^2 - 2 - t) = 0, ascending.
inline std::vector<double> solve_z(double x, double y, double t) {
    const double b = -x * y;
    const double c = x * x + y * y - 2.0 - t;
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0) return {};
    if (disc == 0.0) return {-b / 2.0};
    // Stable form: q = -(b + sign(b) sqrt(disc)) / 2, roots q and c / q.
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    double r1, r2;
    if (q == 0.0) {
        r1 = -sq / 2.0;
        r2 = sq / 2.0;
    } else {
        r1 = q;
        r2 = c / q;
    }
    if (r1 > r2) std::swap(r1, r2);
    return {r1, r2};
}

inline constexpr double kReducibleTolerance = 1e-9;

/// A pair with chi = p, conjugate to the normal form g = [[x, -1], [1, 0]].
/// h has tr h = y and tr gh = z; writing h = [[p, q], [r, y - p]] leaves a
/// quadratic in q whose discriminant D(p) = (x^2-4) p^2 + (4y - 2xz) p +
/// z^2 - 4 must be made non-negative by the choice of p.
inline PairState fricke_pair(const TraceTriple& t) {
    const double x = t.x, y = t.y, z = t.z;
    if (std::abs(kappa(t) - 2.0) < kReducibleTolerance) {
        throw Error(ErrorCode::ReducibleTriple, "kappa = 2: reducible character");
    }
    const double A = x * x - 4.0, B = 4.0 * y - 2.0 * x * z, C = z * z - 4.0;
    double p;
    if (std::abs(A) > 1e-12) {
        const double vertex = -B / (2.0 * A);
        const double extremum = C - B * B / (4.0 * A);
        if (A < 0.0) {
            if (extremum < 0.0) {
                throw Error(ErrorCode::NotRealizable, "no SL(2,R) pair has these traces");
            }
            p = vertex;
        } else {
            p = vertex + std::sqrt((std::max(0.0, -extremum) + 1.0) / A);
        }
    } else if (std::abs(B) > 1e-12) {
        p = (1.0 + std::abs(C) - C) / B;  // D(p) = 1 + |C|
    } else if (C >= 0.0) {
        p = 0.0;
    } else {
        throw Error(ErrorCode::NotRealizable, "no SL(2,R) pair has these traces");
    }
    // |p| is large when x is near +-2, so h is formed in binary128 and then
    // conjugated to moderate size.
    const wide_real pw = p, xw = x, yw = y, zw = z;
    const wide_real Dw = (xw * xw - 4) * pw * pw + (4 * yw - 2 * xw * zw) * pw + zw * zw - 4;
    wide_real root = 0;
    if (Dw > 0) {
        root = std::sqrt(static_cast<double>(Dw));
        for (int i = 0; i < 2; ++i) root = (root + Dw / root) / 2;
    }
    // q^2 + (xp - z) q + (1 - p(y - p)) = 0
    const wide_real q = (zw - xw * pw + root) / 2;
    const wide_real r = xw * pw + q - zw;
    const WideElem g{xw, -1, 1, 0};
    const WideElem h{pw, q, r, yw - pw};
    const GroupElem k = balancing_conjugator({g.narrow(), h.narrow().normalized()});
    return {wide_conjugate(g, k).narrow(), wide_conjugate(h, k).narrow()};
}

struct FiberSpec {
    double t = 10.0;
    std::optional<int> level;
    int count = 1;
    std::uint64_t seed = 1;
    /// x and y are drawn uniformly from [-box, box].
    double box = 3.0;
    /// Scale of the random conjugating element.
    double conjugation_scale = 0.5;
    long budget = 100000;
};

struct FiberSample {
    PairState pair;
    TraceTriple triple;  // chi at construction, before conjugation
    FiberClass fiber;
};

/// Pairs with kappa(chi) = t: (x, y) uniform in the box, z a random root of
/// kappa = t, then a random simultaneous conjugation. This measure is a
/// convenience for experiments, not an invariant measure on the fiber.
inline std::vector<FiberSample> sample_fiber(const FiberSpec& spec) {
    if (spec.count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
    if (std::abs(spec.t - 2.0) < kReducibleTolerance) {
        throw Error(ErrorCode::ReducibleTriple, "t = 2 fibers consist of reducible pairs");
    }
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coord(-spec.box, spec.box);
    std::vector<FiberSample> out;
    long attempts = 0, realizable = 0;
    while (static_cast<int>(out.size()) < spec.count) {
        if (++attempts > spec.budget) {
            if (realizable == 0) throw Error(ErrorCode::NotRealizable, "no realizable triple found");
            throw Error(ErrorCode::LevelUnreachable, "requested level not found within budget");
        }
        const double x = coord(rng), y = coord(rng);
        const std::vector<double> roots = solve_z(x, y, spec.t);
        if (roots.empty()) continue;
        const double z = roots[std::uniform_int_distribution<std::size_t>(0, roots.size() - 1)(rng)];
        const TraceTriple tr{x, y, z};
        PairState pair;
        try {
            pair = fricke_pair(tr);
        } catch (const Error&) {
            continue;
        }
        ++realizable;
        pair = conjugate(pair, random_element(rng, std::nullopt, spec.conjugation_scale));
        if (std::abs(commutator(pair.g, pair.h).trace() - spec.t) >= kLevelTolerance) continue;
        FiberClass fc;
        try {
            fc = fiber_class(pair.g, pair.h);
        } catch (const Error&) {
            continue;
        }
        if (spec.level && fc.level != *spec.level) continue;
        out.push_back({pair, tr, fc});
    }
    return out;
}

}  // namespace onehole
