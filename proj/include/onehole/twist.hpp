#pragma once

// Dehn twists on matrix pairs, the induced GL(2,Z) matrices, the continuous
// flow A2(t): (g,h) -> (g, h g^-t) along the centralizer of an elliptic g,
// and the pipeline that moves a pair with kappa > 2 to an elliptic pair.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "onehole/character.hpp"
#include "onehole/cover.hpp"
#include "onehole/error.hpp"
#include "onehole/lie.hpp"
#include "onehole/mobius.hpp"

namespace onehole {

struct PairState {
    GroupElem g{};
    GroupElem h{};
};

inline TraceTriple chi(const PairState& s) { return chi(s.g, s.h); }

inline PairState conjugate(const PairState& s, const GroupElem& k) {
    return {conjugate(s.g, k), conjugate(s.h, k)};
}

inline double frobenius_squared(const PairState& s) {
    const auto sq = [](const GroupElem& m) { return m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d; };
    return sq(s.g) + sq(s.h);
}

/// A simultaneous conjugate of s whose entries are as small as possible:
/// gradient descent for ||kgk^-1||^2 + ||khk^-1||^2 over positive symmetric
/// k, which is geodesically convex. Words in long orbits drift along the
/// conjugacy orbit without this. The accumulated k is applied to s once, in
/// binary128, so the traces do not pick up the rounding of the large
/// intermediate entries.
inline GroupElem balancing_conjugator(const PairState& s, int max_iter = 200) {
    PairState cur{s.g.normalized(), s.h.normalized()};
    GroupElem total{};
    double f = frobenius_squared(cur);
    for (int it = 0; it < max_iter; ++it) {
        // Gradient along k = exp(S), S = [[p, q], [q, -p]]: sum of m m^T - m^T m.
        double gp = 0.0, gq = 0.0;
        for (const GroupElem* m : {&cur.g, &cur.h}) {
            gp += (m->a * m->a + m->b * m->b) - (m->a * m->a + m->c * m->c);
            gq += (m->a * m->c + m->b * m->d) - (m->a * m->b + m->c * m->d);
        }
        const double gn = std::hypot(gp, gq);
        if (gn < 1e-12 * f) break;
        double step = 0.5;
        bool improved = false;
        for (int k = 0; k < 60; ++k, step *= 0.5) {
            const GroupElem conj = detail::exp_traceless(-step * gp / gn, -step * gq / gn,
                                                         -step * gq / gn);
            const PairState next{conjugate(cur.g, conj), conjugate(cur.h, conj)};
            const double fn = frobenius_squared(next);
            if (fn < f) {
                cur = next;
                total = compose(conj, total);
                improved = f - fn > 1e-14 * f;
                f = fn;
                break;
            }
        }
        if (!improved) break;
    }
    return total;
}

/// k m k^-1 in binary128.
inline WideElem wide_conjugate(const WideElem& m, const GroupElem& k) {
    const WideElem kw = WideElem::from(k).normalized();
    return multiply(multiply(kw, m.normalized()), kw.inverse()).normalized();
}

inline PairState balance(const PairState& s, int max_iter = 200) {
    const GroupElem k = balancing_conjugator(s, max_iter);
    return {wide_conjugate(WideElem::from(s.g), k).narrow(),
            wide_conjugate(WideElem::from(s.h), k).narrow()};
}

/// T1(g,h) = (gh^-1, h), T2(g,h) = (g, hg^-1), Q(g,h) = (g^-1, h). The sign
/// changes negate one SL(2,R) representative and are trivial in PSL(2,R).
inline PairState apply_twist(Move m, const PairState& s) {
    switch (m) {
        case Move::T1: return {compose(s.g, s.h.inverse()), s.h};
        case Move::T1Inv: return {compose(s.g, s.h), s.h};
        case Move::T2: return {s.g, compose(s.h, s.g.inverse())};
        case Move::T2Inv: return {s.g, compose(s.h, s.g)};
        case Move::Q: return {s.g.inverse(), s.h};
        case Move::Sigma1: return {s.g, -s.h};
        case Move::Sigma2: return {-s.g, s.h};
    }
    return s;
}

using IntMatrix = std::array<long long, 4>;  // row-major 2x2

constexpr IntMatrix multiply(const IntMatrix& m, const IntMatrix& n) {
    return {m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3]};
}

constexpr long long det(const IntMatrix& m) { return m[0] * m[3] - m[1] * m[2]; }

constexpr bool is_mapping_class(Move m) { return m != Move::Sigma1 && m != Move::Sigma2; }

/// Homology action of a single letter.
constexpr IntMatrix letter_matrix(Move m) {
    switch (m) {
        case Move::T1: return {1, 0, 1, 1};
        case Move::T1Inv: return {1, 0, -1, 1};
        case Move::T2: return {1, 1, 0, 1};
        case Move::T2Inv: return {1, -1, 0, 1};
        case Move::Q: return {-1, 0, 0, 1};
        default: return {1, 0, 0, 1};
    }
}

/// A word over {T1, T1i, T2, T2i, Q} in written order; it acts as the
/// composite of its letters, the last letter first.
class TwistWord {
public:
    TwistWord() = default;
    explicit TwistWord(std::vector<Move> letters) : letters_(std::move(letters)) {
        for (Move m : letters_) {
            if (!is_mapping_class(m)) {
                throw Error(ErrorCode::InvalidArgument, "sign changes are not twist letters");
            }
        }
    }

    const std::vector<Move>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }

    /// Product of the per-letter matrices in written order.
    IntMatrix induced_matrix() const {
        IntMatrix m{1, 0, 0, 1};
        for (Move l : letters_) m = multiply(m, letter_matrix(l));
        return m;
    }

    /// Uses only T1, T2 and their inverses.
    bool in_twist_group() const {
        for (Move l : letters_) {
            if (l == Move::Q) return false;
        }
        return true;
    }

    TwistWord inverse() const {
        std::vector<Move> inv;
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
            inv.push_back(onehole::inverse(*it));
        }
        return TwistWord(std::move(inv));
    }

    friend TwistWord operator*(const TwistWord& a, const TwistWord& b) {
        std::vector<Move> l = a.letters_;
        l.insert(l.end(), b.letters_.begin(), b.letters_.end());
        return TwistWord(std::move(l));
    }

private:
    std::vector<Move> letters_;
};

inline PairState apply_word(const std::vector<Move>& word, PairState s) {
    for (auto it = word.rbegin(); it != word.rend(); ++it) s = apply_twist(*it, s);
    return s;
}

inline PairState apply_word(const TwistWord& word, const PairState& s) {
    return apply_word(word.letters(), s);
}

// ---------------------------------------------------------------------------
// Quad-precision pairs
//
// Long twist words produce entries of size N while [g,h] stays O(1), so a
// double-precision word loses about 4 log10(N) digits of the commutator.
// Carrying the word in binary128 keeps it accurate for N up to roughly 1e6.

struct WidePair {
    WideElem g, h;

    static WidePair from(const PairState& s) {
        const PairState n{s.g.normalized(), s.h.normalized()};
        return {WideElem::from(n.g), WideElem::from(n.h)};
    }
    PairState narrow() const { return {g.narrow().normalized(), h.narrow().normalized()}; }
};

inline WidePair apply_twist(Move m, const WidePair& s) {
    switch (m) {
        case Move::T1: return {multiply(s.g, s.h.inverse()), s.h};
        case Move::T1Inv: return {multiply(s.g, s.h), s.h};
        case Move::T2: return {s.g, multiply(s.h, s.g.inverse())};
        case Move::T2Inv: return {s.g, multiply(s.h, s.g)};
        case Move::Q: return {s.g.inverse(), s.h};
        case Move::Sigma1: return {s.g, {-s.h.a, -s.h.b, -s.h.c, -s.h.d}};
        case Move::Sigma2: return {{-s.g.a, -s.g.b, -s.g.c, -s.g.d}, s.h};
    }
    return s;
}

inline WidePair apply_word(const std::vector<Move>& word, WidePair s) {
    for (auto it = word.rbegin(); it != word.rend(); ++it) s = apply_twist(*it, s);
    return s;
}

inline WidePair apply_word(const TwistWord& word, const WidePair& s) {
    return apply_word(word.letters(), s);
}

inline GroupElem commutator(const WidePair& s) { return wide_commutator(s.g, s.h); }

inline TraceTriple chi(const WidePair& s) {
    const WideElem gh = multiply(s.g, s.h);
    return {static_cast<double>(s.g.a + s.g.d), static_cast<double>(s.h.a + s.h.d),
            static_cast<double>(gh.a + gh.d)};
}

/// The lifted commutator computed entirely from the binary128 pair.
inline LiftedElem lifted_commutator(const WidePair& s) {
    return {commutator(s), commutator_winding(s.g, s.h)};
}

inline FiberClass fiber_class(const WidePair& s) { return fiber_class(lifted_commutator(s)); }

/// A trace word split into its mapping-class part plus the sign changes that
/// must follow it: word(s) == signs(twists(s)) on SL(2,R) representatives.
struct SignSplit {
    TwistWord twists;
    bool negate_g = false;
    bool negate_h = false;
};

inline SignSplit split_signs(const TraceWord& word) {
    std::vector<Move> letters;
    int sg = 1, sh = 1;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        switch (*it) {
            case Move::T1:
            case Move::T1Inv: sg *= sh; break;
            case Move::T2:
            case Move::T2Inv: sh *= sg; break;
            case Move::Q: break;
            case Move::Sigma1: sh = -sh; break;
            case Move::Sigma2: sg = -sg; break;
        }
        if (is_mapping_class(*it)) letters.insert(letters.begin(), *it);
    }
    return {TwistWord(std::move(letters)), sg < 0, sh < 0};
}

// ---------------------------------------------------------------------------
// Elliptic powers and the A2 flow

/// g^s for elliptic g: rotation about the fixed point of g through s times
/// the angle of the given SL(2,R) representative, so that s = n reproduces
/// the matrix power g^n.
inline GroupElem elliptic_power(const GroupElem& g, double s) {
    if (!is_elliptic(g)) throw Error(ErrorCode::NotElliptic, "elliptic_power needs |tr g| < 2");
    const double u = rotation_angle(g);
    const AlgVec j = rotation_generator(g);
    const double cs = std::cos(s * u), sn = std::sin(s * u);
    return GroupElem{cs + sn * j.a, sn * j.b, sn * j.c, cs - sn * j.a}.normalized();
}

/// A2(a_t): (g, h) -> (g, h a_t(g)^-1) with a_t(g) = g^t.
inline PairState a2_flow(const PairState& s, double t) {
    return {s.g, compose(s.h, elliptic_power(s.g, -t))};
}

inline constexpr long kEllipticizeBudget = 1000000;

struct EllipticizeResult {
    long n = 0;        // h' = h g^n, i.e. the flow A2 at time -n
    PairState state;
};

/// Smallest n >= 0 with h g^n elliptic. tr(h g^n) = A cos(nu) + B sin(nu),
/// which comes arbitrarily close to 0 when u / pi is irrational.
inline EllipticizeResult ellipticize(const PairState& s, long budget = kEllipticizeBudget) {
    if (!is_elliptic(s.g)) throw Error(ErrorCode::NotElliptic, "ellipticize needs elliptic g");
    if (is_elliptic(s.h)) return {0, s};
    if (!is_non_torsion(s.g)) {
        throw Error(ErrorCode::TorsionRotation, "g has finite order to working precision");
    }
    const double u = rotation_angle(s.g);
    const AlgVec j = rotation_generator(s.g);
    const GroupElem& h = s.h;
    const double tr_h = h.trace();
    const double tr_hj = h.a * j.a + h.b * j.c + h.c * j.b - h.d * j.a;
    for (long n = 1; n <= budget; ++n) {
        const double phase = static_cast<double>(n) * u;
        const double tr = tr_h * std::cos(phase) + tr_hj * std::sin(phase);
        if (std::abs(tr) < 2.0 - 1e-6) {
            const PairState out{s.g, compose(h, elliptic_power(s.g, static_cast<double>(n)))};
            if (is_elliptic(out.h)) return {n, out};
        }
    }
    throw Error(ErrorCode::SearchBudgetExceeded, "no elliptic h g^n within the budget");
}

namespace detail {

inline EllipticizeResult ellipticize_finite(const PairState& s, long period) {
    GroupElem h = s.h;
    for (long n = 1; n <= period; ++n) {
        h = compose(h, s.g);
        if (std::abs(h.trace()) < 2.0 - 1e-6) return {n, {s.g, h}};
    }
    throw Error(ErrorCode::TorsionRotation, "the finite orbit of h g^n misses the elliptic set");
}

}  // namespace detail

struct ContinuousEllipticizeResult {
    double s = 0.0;    // h' = h g^s, i.e. the flow A2 at time -s
    PairState state;
};

/// Smallest s > 0 with tr(h g^s) = 0, solved in closed form.
inline ContinuousEllipticizeResult ellipticize_continuous(const PairState& st) {
    if (!is_elliptic(st.g)) throw Error(ErrorCode::NotElliptic, "needs elliptic g");
    if (is_elliptic(st.h)) return {0.0, st};
    const double u = rotation_angle(st.g);
    const AlgVec j = rotation_generator(st.g);
    const GroupElem& h = st.h;
    const double A = h.trace();
    const double B = h.a * j.a + h.b * j.c + h.c * j.b - h.d * j.a;
    // A cos(su) + B sin(su) = R cos(su - delta) vanishes at su = delta + pi/2 mod pi.
    const double target = std::atan2(B, A) + std::numbers::pi / 2;
    double r = std::fmod(target, std::numbers::pi);
    if (r < 0.0) r += std::numbers::pi;
    const double s = u > 0.0 ? (r == 0.0 ? std::numbers::pi : r) / u : (r - std::numbers::pi) / u;
    return {s, {st.g, compose(h, elliptic_power(st.g, s))}};
}

// ---------------------------------------------------------------------------
// Full pipeline

struct TranscriptEntry {
    enum class Kind { Twist, EllipticPower } kind = Kind::Twist;
    Move move = Move::T1;  // Kind::Twist
    long power = 0;        // Kind::EllipticPower: h -> h g^power
    TraceTriple after;
};

struct FullReduction {
    std::vector<TranscriptEntry> transcript;
    PairState state;
};

/// Twist words move the first trace into (-2, 2); the flow A2 then makes the
/// second element elliptic. Requires kappa(chi(s)) > 2.
inline FullReduction full_reduction(const PairState& s, long budget = kEllipticizeBudget) {
    const TraceTriple p = chi(s);
    if (!(kappa(p) > 2.0)) throw Error(ErrorCode::PreconditionKappa, "needs kappa > 2");
    FullReduction out;
    out.state = s;
    if (is_elliptic(s.g) && is_elliptic(s.h)) return out;

    const ReductionResult r = reduce_to_region(p, ReductionMode::TwistsOnly);
    if (r.region != Region::NegativeOctant) {
        for (auto it = r.word.rbegin(); it != r.word.rend(); ++it) {
            out.state = apply_twist(*it, out.state);
            out.transcript.push_back({TranscriptEntry::Kind::Twist, *it, 0, chi(out.state)});
        }
    } else {
        throw Error(ErrorCode::PreconditionKappa,
                    "triple lies in the negative-octant orbit; no elliptic representative");
    }
    if (!is_elliptic(out.state.g)) {
        throw Error(ErrorCode::NotElliptic, "twist descent did not produce an elliptic g");
    }
    EllipticizeResult e;
    try {
        e = ellipticize(out.state, budget);
    } catch (const Error& err) {
        if (err.code() != ErrorCode::TorsionRotation) throw;
        // g^n has finite period here, but one period may still reach the slab.
        e = detail::ellipticize_finite(out.state, 2 * kTorsionMaxDenominator);
    }
    if (e.n != 0) {
        out.state = e.state;
        out.transcript.push_back(
            {TranscriptEntry::Kind::EllipticPower, Move::T1, e.n, chi(out.state)});
    }
    return out;
}

}  // namespace onehole
