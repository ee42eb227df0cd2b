#pragma once

// Trace coordinates (x, y, z) = (tr g, tr h, tr gh), the polynomial
// kappa = tr [g,h], its automorphisms, and the descent that moves a triple
// into the elliptic slab (-2,2) x R x R or the negative octant (-inf,-2)^3.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "onehole/error.hpp"
#include "onehole/mobius.hpp"

namespace onehole {

struct TraceTriple {
    double x = 2.0, y = 2.0, z = 2.0;

    double max_abs() const { return std::max({std::abs(x), std::abs(y), std::abs(z)}); }
    double sum_squares() const { return x * x + y * y + z * z; }
};

inline double distance(const TraceTriple& p, const TraceTriple& q) {
    return std::max({std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.z - q.z)});
}

inline std::ostream& operator<<(std::ostream& os, const TraceTriple& p) {
    return os << "(" << p.x << ", " << p.y << ", " << p.z << ")";
}

/// x^2 + y^2 + z^2 - xyz - 2.
constexpr double kappa(double x, double y, double z) {
    return x * x + y * y + z * z - x * y * z - 2.0;
}
constexpr double kappa(const TraceTriple& p) { return kappa(p.x, p.y, p.z); }

inline constexpr double kLevelTolerance = 1e-6;

inline bool on_level(const TraceTriple& p, double t, double tol = kLevelTolerance) {
    return std::abs(kappa(p) - t) < tol;
}

/// Traces of the given SL(2,R) representatives.
inline TraceTriple chi(const GroupElem& g, const GroupElem& h) {
    return {g.trace(), h.trace(), multiply(g, h).trace()};
}

/// Generators of the action on triples. T1, T2 and Q come from the pair maps
/// T1(g,h) = (gh^-1, h), T2(g,h) = (g, hg^-1), Q(g,h) = (g^-1, h); the sigmas
/// are the sign changes (x,-y,-z) and (-x,y,-z).
enum class Move { T1, T1Inv, T2, T2Inv, Q, Sigma1, Sigma2 };

inline constexpr std::array<Move, 7> kAllMoves{Move::T1, Move::T1Inv, Move::T2, Move::T2Inv,
                                               Move::Q, Move::Sigma1, Move::Sigma2};

constexpr std::string_view to_string(Move m) {
    switch (m) {
        case Move::T1: return "T1";
        case Move::T1Inv: return "T1i";
        case Move::T2: return "T2";
        case Move::T2Inv: return "T2i";
        case Move::Q: return "Q";
        case Move::Sigma1: return "S1";
        case Move::Sigma2: return "S2";
    }
    return "?";
}

inline std::optional<Move> parse_move(std::string_view s) {
    for (Move m : kAllMoves) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

constexpr Move inverse(Move m) {
    switch (m) {
        case Move::T1: return Move::T1Inv;
        case Move::T1Inv: return Move::T1;
        case Move::T2: return Move::T2Inv;
        case Move::T2Inv: return Move::T2;
        default: return m;  // involutions
    }
}

constexpr TraceTriple twist_on_traces(Move m, const TraceTriple& p) {
    const double x = p.x, y = p.y, z = p.z;
    switch (m) {
        case Move::T1: return {x * y - z, y, x};
        case Move::T1Inv: return {z, y, y * z - x};
        case Move::T2: return {x, x * y - z, y};
        case Move::T2Inv: return {x, z, x * z - y};
        case Move::Q: return {x, y, x * y - z};
        case Move::Sigma1: return {x, -y, -z};
        case Move::Sigma2: return {-x, y, -z};
    }
    return p;
}

/// A word in written order: {m1, m2, ..., mn} acts as m1 o m2 o ... o mn,
/// so the last move is applied first.
using TraceWord = std::vector<Move>;

inline TraceTriple apply_trace_word(const TraceWord& word, TraceTriple p) {
    for (auto it = word.rbegin(); it != word.rend(); ++it) p = twist_on_traces(*it, p);
    return p;
}

/// (x,y,z) -> (y,z,x) and (x,y,z) -> (z,x,y), both inside the group
/// generated by T1 and T2.
inline const TraceWord kCycleForward{Move::T1, Move::T2Inv};
inline const TraceWord kCycleBackward{Move::T2, Move::T1Inv};

enum class Region { EllipticSlab, NegativeOctant, LowKappa };

constexpr std::string_view to_string(Region r) {
    switch (r) {
        case Region::EllipticSlab: return "EllipticSlab";
        case Region::NegativeOctant: return "NegativeOctant";
        case Region::LowKappa: return "LowKappa";
    }
    return "?";
}

/// Region membership of the triple as given (no moves applied). The checks
/// are exclusive and applied in the order slab, octant, low kappa.
inline std::optional<Region> region_of(const TraceTriple& p) {
    if (std::abs(p.x) < 2.0) return Region::EllipticSlab;
    if (p.x < -2.0 && p.y < -2.0 && p.z < -2.0) return Region::NegativeOctant;
    if (kappa(p) <= 2.0) return Region::LowKappa;
    return std::nullopt;
}

enum class ReductionMode {
    /// All of Aut(kappa): twists, Q, permutations and sign changes.
    Full,
    /// Only words in T1, T2 (the mapping classes fixing the boundary arc);
    /// sign changes are reported in `sign_fix` instead of applied.
    TwistsOnly,
};

inline constexpr int kReductionBudget = 10000;

struct ReductionResult {
    TraceWord word;          // q = apply_trace_word(word, p)
    TraceTriple q;
    Region region = Region::EllipticSlab;
    int iterations = 0;
    /// TwistsOnly mode, NegativeOctant: sign changes taking q into the octant.
    bool needs_sigma1 = false;
    bool needs_sigma2 = false;
};

class ReductionBudgetError : public Error {
public:
    ReductionBudgetError(const std::string& what, TraceTriple best)
        : Error(ErrorCode::IterationBudgetExceeded, what), best_(best) {}
    const TraceTriple& best() const noexcept { return best_; }

private:
    TraceTriple best_;
};

/// Greedy descent on max(|x|,|y|,|z|). When no generator lowers the maximum,
/// the one that strictly lowers the sum of squares is taken. Ties go to the
/// first generator in the order T1, T1i, T2, T2i, Q. Requires kappa(p) > 2.
inline ReductionResult reduce_to_region(const TraceTriple& p,
                                        ReductionMode mode = ReductionMode::Full,
                                        int budget = kReductionBudget) {
    if (!(kappa(p) > 2.0)) {
        throw Error(ErrorCode::PreconditionKappa, "reduction needs kappa > 2");
    }
    std::vector<Move> steps;  // chronological
    TraceTriple cur = p;
    auto finish = [&](Region r, int iterations) {
        ReductionResult out;
        out.word.assign(steps.rbegin(), steps.rend());
        out.q = cur;
        out.region = r;
        out.iterations = iterations;
        return out;
    };
    auto push_word = [&](const TraceWord& w) {
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
            steps.push_back(*it);
            cur = twist_on_traces(*it, cur);
        }
    };

    const std::vector<Move> candidates =
        mode == ReductionMode::Full
            ? std::vector<Move>{Move::T1, Move::T1Inv, Move::T2, Move::T2Inv, Move::Q}
            : std::vector<Move>{Move::T1, Move::T1Inv, Move::T2, Move::T2Inv};

    for (int it = 0; it <= budget; ++it) {
        if (std::abs(cur.x) < 2.0) return finish(Region::EllipticSlab, it);
        if (std::abs(cur.y) < 2.0) {
            push_word(kCycleForward);
            return finish(Region::EllipticSlab, it);
        }
        if (std::abs(cur.z) < 2.0) {
            push_word(kCycleBackward);
            return finish(Region::EllipticSlab, it);
        }
        if (std::abs(cur.x) > 2.0 && std::abs(cur.y) > 2.0 && std::abs(cur.z) > 2.0 &&
            cur.x * cur.y * cur.z < 0.0) {
            const bool s1 = cur.x < 0.0 && cur.y > 0.0;  // (-, +, +)
            const bool s2 = cur.x > 0.0 && cur.y < 0.0;  // (+, -, +)
            const bool both = cur.x > 0.0 && cur.y > 0.0;  // (+, +, -)
            const bool need1 = s1 || both, need2 = s2 || both;
            if (mode == ReductionMode::Full) {
                if (need1) push_word({Move::Sigma1});
                if (need2) push_word({Move::Sigma2});
                return finish(Region::NegativeOctant, it);
            }
            ReductionResult out = finish(Region::NegativeOctant, it);
            out.needs_sigma1 = need1;
            out.needs_sigma2 = need2;
            return out;
        }
        if (it == budget) break;

        const double m0 = cur.max_abs(), s0 = cur.sum_squares();
        std::optional<Move> best_max, best_sq;
        double bm = m0, bs = s0;
        for (Move m : candidates) {
            const TraceTriple next = twist_on_traces(m, cur);
            if (next.max_abs() < bm) {
                bm = next.max_abs();
                best_max = m;
            }
            if (next.sum_squares() < bs) {
                bs = next.sum_squares();
                best_sq = m;
            }
        }
        const std::optional<Move> choice = best_max ? best_max : best_sq;
        if (!choice) throw ReductionBudgetError("descent stalled", cur);
        steps.push_back(*choice);
        cur = twist_on_traces(*choice, cur);
    }
    throw ReductionBudgetError("no region reached within the iteration budget", cur);
}

enum class Regime { ProperlyDiscontinuous, Boundary, Ergodic, Mixed };

constexpr std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::ProperlyDiscontinuous: return "ProperlyDiscontinuous";
        case Regime::Boundary: return "Boundary";
        case Regime::Ergodic: return "Ergodic";
        case Regime::Mixed: return "Mixed";
    }
    return "?";
}

inline constexpr double kRegimeBand = 1e-9;

/// Behaviour of the twist group on the fiber with boundary trace t:
/// t < 2 discontinuous, 2 < t < 18 ergodic, t >= 18 a discontinuous open
/// region plus an ergodic complement.
constexpr Regime trichotomy(double t) {
    if (t < 2.0 - kRegimeBand) return Regime::ProperlyDiscontinuous;
    if (t <= 2.0 + kRegimeBand) return Regime::Boundary;
    if (t < 18.0) return Regime::Ergodic;
    return Regime::Mixed;
}

/// Whether p lies in the Aut(kappa)-saturation of the negative octant.
inline bool omega_membership(const TraceTriple& p, int budget = kReductionBudget) {
    if (!(kappa(p) >= 18.0)) {
        throw Error(ErrorCode::PreconditionKappa, "omega membership needs kappa >= 18");
    }
    return reduce_to_region(p, ReductionMode::Full, budget).region == Region::NegativeOctant;
}

}  // namespace onehole
