#pragma once

// The universal cover of PSL(2,R), modeled as pairs (g, w) where w is the
// value at 0 of a continuous lift of the boundary circle map of g.

#include <cmath>
#include <limits>
#include <numbers>

#include <quadmath.h>

#include "onehole/error.hpp"
#include "onehole/mobius.hpp"

namespace onehole {

struct LiftedElem {
    GroupElem g{};
    double w = 0.0;

    /// The same element of G shifted by k turns of the deck group.
    LiftedElem deck_shift(int k) const { return {g, w + kTwoPi * k}; }
};

/// Lift of g with w = boundary_angle(g, 0) in [0, 2 pi).
inline LiftedElem canonical_lift(const GroupElem& g) { return {g, boundary_angle(g, 0.0)}; }

namespace detail {

inline constexpr int kMaxUnwrapDepth = 60;

// Signed difference of two angles in (-pi, pi].
inline double angle_step(double from, double to) {
    double d = std::remainder(to - from, kTwoPi);
    if (d <= -std::numbers::pi) d += kTwoPi;
    return d;
}

// Accumulated increment of f along [a, b], bisecting until each accepted
// step is below pi/2.
template <class F>
double unwrap_segment(const F& f, double a, double fa, double b, double fb, int depth) {
    const double d = angle_step(fa, fb);
    if (std::abs(d) < std::numbers::pi / 2) return d;
    if (depth >= kMaxUnwrapDepth) {
        throw Error(ErrorCode::UnwrapResolutionExceeded, "boundary map too steep to unwrap");
    }
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    return unwrap_segment(f, a, fa, m, fm, depth + 1) + unwrap_segment(f, m, fm, b, fb, depth + 1);
}

template <class F>
double unwrap(const F& f, double from, double to) {
    if (from == to) return 0.0;
    const int pieces =
        std::max(1, static_cast<int>(std::ceil(std::abs(to - from) / (std::numbers::pi / 4))));
    double total = 0.0;
    double a = from, fa = f(from);
    for (int i = 1; i <= pieces; ++i) {
        const double b = i == pieces ? to : from + (to - from) * i / pieces;
        const double fb = f(b);
        total += unwrap_segment(f, a, fa, b, fb, 0);
        a = b;
        fa = fb;
    }
    return total;
}

// Bound on the derivative 1 / |conj(beta) e^{i theta} + conj(alpha)|^2 of the
// boundary map over the arc between a and b.
inline double arc_lipschitz(const DiskElem& m, double a, double b) {
    const double nb = std::abs(m.beta);
    if (nb == 0.0) return 1.0 / std::norm(m.alpha);
    const std::complex<double> pole = -std::conj(m.alpha) / std::conj(m.beta);
    const double lo = std::min(a, b), hi = std::max(a, b);
    double off = std::remainder(std::arg(pole) - 0.5 * (lo + hi), kTwoPi);
    double dist;
    if (std::abs(off) <= 0.5 * (hi - lo)) {
        dist = std::abs(pole) - 1.0;
    } else {
        dist = std::min(std::abs(std::polar(1.0, lo) - pole), std::abs(std::polar(1.0, hi) - pole));
    }
    const double s = nb * dist;
    return s > 0.0 ? 1.0 / (s * s) : std::numeric_limits<double>::infinity();
}

// Segments are accepted only when the derivative bound rules out a hidden
// full turn, so a compressed map cannot be mistaken for rounding noise.
inline double unwrap_circle_segment(const GroupElem& g, const DiskElem& m, double a, double fa,
                                    double b, double fb, int depth) {
    if (std::abs(b - a) * arc_lipschitz(m, a, b) < std::numbers::pi / 2) {
        return angle_step(fa, fb);
    }
    const double mid = 0.5 * (a + b);
    if (depth >= kMaxUnwrapDepth || mid == a || mid == b) {
        throw Error(ErrorCode::UnwrapResolutionExceeded, "boundary map too steep to unwrap");
    }
    const double fm = boundary_angle(g, mid);
    return unwrap_circle_segment(g, m, a, fa, mid, fm, depth + 1) +
           unwrap_circle_segment(g, m, mid, fm, b, fb, depth + 1);
}

}  // namespace detail

/// Value at x of the continuous monotone lift pinned by lifted.w at 0.
inline double lift_eval(const LiftedElem& lifted, double x) {
    if (x == 0.0) return lifted.w;
    const DiskElem m = cayley_to_disk(lifted.g);
    const int pieces =
        std::max(1, static_cast<int>(std::ceil(std::abs(x) / (std::numbers::pi / 4))));
    double total = 0.0;
    double a = 0.0, fa = boundary_angle(lifted.g, 0.0);
    for (int i = 1; i <= pieces; ++i) {
        const double b = i == pieces ? x : x * i / pieces;
        const double fb = boundary_angle(lifted.g, b);
        total += detail::unwrap_circle_segment(lifted.g, m, a, fa, b, fb, 0);
        a = b;
        fa = fb;
    }
    return lifted.w + total;
}

/// (gh, f_g(f_h(0))).
inline LiftedElem compose_lifts(const LiftedElem& g, const LiftedElem& h) {
    return {compose(g.g, h.g), lift_eval(g, h.w)};
}

inline LiftedElem inverse_lift(const LiftedElem& g) {
    const LiftedElem candidate = canonical_lift(g.g.inverse());
    const double back = lift_eval(candidate, g.w);  // a multiple of 2 pi
    return {candidate.g, candidate.w - kTwoPi * std::round(back / kTwoPi)};
}

/// Lift coordinate of [g~, h~], evaluated as f_g(f_h(f_g^-1(f_h^-1(0)))) so
/// that only the four generator maps are sampled, never the badly
/// conditioned partial products.
inline double commutator_winding(const LiftedElem& g, const LiftedElem& h) {
    const LiftedElem gi = inverse_lift(g), hi = inverse_lift(h);
    return lift_eval(g, lift_eval(h, lift_eval(gi, hi.w)));
}

/// [g~, h~] for arbitrary lifts; the result depends only on (g, h).
inline LiftedElem lifted_commutator(const LiftedElem& g, const LiftedElem& h) {
    return {commutator(g.g, h.g), commutator_winding(g, h)};
}

namespace detail {

// Closed-form lift theta + 2 arg(alpha) + 2 Arg(1 + (beta/alpha) e^{-i theta})
// of the boundary map in binary128. |beta/alpha| < 1 keeps the second
// argument in (-pi/2, pi/2), so no unwrapping is involved.
inline wide_real wide_lift(const WideElem& g, wide_real theta) {
    const wide_real ar = (g.a + g.d) / 2, ai = (g.b - g.c) / 2;
    const wide_real br = (g.a - g.d) / 2, bi = -(g.b + g.c) / 2;
    const wide_real n = ar * ar + ai * ai;
    const wide_real ur = (br * ar + bi * ai) / n, ui = (bi * ar - br * ai) / n;
    const wide_real cs = cosq(theta), sn = sinq(theta);
    // 1 + u e^{-i theta}
    const wide_real vr = 1 + ur * cs + ui * sn, vi = ui * cs - ur * sn;
    return theta + 2 * atan2q(ai, ar) + 2 * atan2q(vi, vr);
}

}  // namespace detail

/// Winding of [g~, h~] from binary128 entries. Long twist words leave
/// entries of size N with O(1) commutator; double evaluation of the four
/// boundary maps then loses about 2 log10(N) digits per map, which this
/// path avoids for N up to about 1e6.
inline double commutator_winding(const WideElem& g0, const WideElem& h0) {
    const WideElem g = g0.normalized(), h = h0.normalized();
    const WideElem gi = g.inverse(), hi = h.inverse();
    const wide_real two_pi = 2 * M_PIq;
    // Shift the closed forms of g^-1 and h^-1 so they invert those of g, h.
    const auto inverse_shift = [&](const WideElem& m, const WideElem& mi) {
        return two_pi * roundq(detail::wide_lift(m, detail::wide_lift(mi, 0)) / two_pi);
    };
    const wide_real sg = inverse_shift(g, gi), sh = inverse_shift(h, hi);
    const wide_real x0 = detail::wide_lift(hi, 0) - sh;
    const wide_real x1 = detail::wide_lift(gi, x0) - sg;
    return static_cast<double>(detail::wide_lift(g, detail::wide_lift(h, x1)));
}

inline LiftedElem lifted_commutator(const GroupElem& g, const GroupElem& h) {
    return {commutator(g, h), commutator_winding(WideElem::from(g), WideElem::from(h))};
}

inline constexpr double kAmbiguousTrace = 1e-9;

/// Lift of k reached by continuation from the identity along the polar path
/// s -> R(s u) P^s, where k = R(u) P is the polar decomposition of the
/// representative of k with positive trace.
inline double reference_lift(const GroupElem& k) {
    GroupElem m = k.normalized();
    if (std::abs(m.trace()) < kAmbiguousTrace) {
        throw Error(ErrorCode::ReferencePathAmbiguous, "tr [g,h] = 0: both polar paths qualify");
    }
    if (m.trace() < 0.0) m = -m;
    const double u = std::atan2(m.b - m.c, m.a + m.d);  // in (-pi/2, pi/2)
    const GroupElem rot = GroupElem::rotation(2.0 * u);
    const GroupElem p = multiply(rot.inverse(), m);  // symmetric positive
    // log P = (r / sinh r) (P - cosh(r) I) with cosh r = tr P / 2.
    const double half = std::max(1.0, 0.5 * p.trace());
    const double r = std::acosh(half);
    const double scale = r < 1e-8 ? 1.0 : r / std::sinh(r);
    const double sa = scale * 0.5 * (p.a - p.d), sb = scale * 0.5 * (p.b + p.c);
    const auto path = [&](double s) {
        const GroupElem ps = detail::exp_traceless(s * sa, s * sb, s * sb);
        return boundary_angle(compose(GroupElem::rotation(2.0 * s * u), ps), 0.0);
    };
    return detail::unwrap(path, 0.0, 1.0);
}

/// Component data of a pair: t is the trace of the SL(2,R) image of the
/// lifted commutator, level the winding relative to the reference lift.
struct FiberClass {
    double t = 2.0;
    int level = 0;
};

inline FiberClass fiber_class(const LiftedElem& comm) {
    const GroupElem& k = comm.g;
    const double w_ref = reference_lift(k);
    FiberClass out;
    out.level = static_cast<int>(std::lround((comm.w - w_ref) / kTwoPi));
    // The SL(2,R) image: the sign whose alpha + beta has argument w/2 mod 2 pi.
    const DiskElem m = cayley_to_disk(k);
    const std::complex<double> z = m.alpha + m.beta;
    const double align = (std::conj(std::polar(1.0, 0.5 * comm.w)) * z).real();
    out.t = (align >= 0.0 ? 1.0 : -1.0) * k.trace();
    return out;
}

inline FiberClass fiber_class(const GroupElem& g, const GroupElem& h) {
    return fiber_class(lifted_commutator(g, h));
}

}  // namespace onehole
