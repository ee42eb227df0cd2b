#pragma once

// 2x2 real unimodular matrices standing for elements of SL(2,R) / PSL(2,R),
// together with the unit-disk picture and the boundary circle action.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string_view>

#include "onehole/error.hpp"

namespace onehole {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kDetTolerance = 1e-10;
inline constexpr double kProjectiveTolerance = 1e-8;
inline constexpr double kParabolicBand = 1e-9;

/// An SL(2,R) representative [[a, b], [c, d]]. Equality in PSL(2,R) is
/// `projectively_equal`, which identifies g with -g.
struct GroupElem {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    constexpr double det() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }
    constexpr GroupElem inverse() const { return {d, -b, -c, a}; }
    constexpr GroupElem operator-() const { return {-a, -b, -c, -d}; }

    double norm_inf() const {
        return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    }

    /// Rescaled by 1/sqrt(det). Requires det > 0.
    GroupElem normalized() const {
        const double s = 1.0 / std::sqrt(det());
        return {a * s, b * s, c * s, d * s};
    }

    /// Validating constructor; throws InvalidArgument if |det - 1| >= tol.
    static GroupElem checked(double a, double b, double c, double d,
                             double tol = kDetTolerance) {
        const GroupElem g{a, b, c, d};
        if (!(std::abs(g.det() - 1.0) < tol)) {
            throw Error(ErrorCode::InvalidArgument, "matrix is not unimodular");
        }
        return g;
    }

    static constexpr GroupElem identity() { return {}; }

    /// The element acting on the disk as w -> e^{i phi} w.
    static GroupElem rotation(double phi) {
        const double c = std::cos(phi / 2.0), s = std::sin(phi / 2.0);
        return {c, s, -s, c};
    }

    static GroupElem diagonal(double lambda) { return {lambda, 0.0, 0.0, 1.0 / lambda}; }
};

constexpr GroupElem multiply(const GroupElem& g, const GroupElem& h) {
    return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
            g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
}

inline std::ostream& operator<<(std::ostream& os, const GroupElem& g) {
    return os << "[[" << g.a << ", " << g.b << "], [" << g.c << ", " << g.d << "]]";
}

/// Matrix product renormalized to det 1.
inline GroupElem compose(const GroupElem& g, const GroupElem& h) {
    return multiply(g, h).normalized();
}

inline GroupElem operator*(const GroupElem& g, const GroupElem& h) { return compose(g, h); }

// Binary128 2x2 matrices, for products whose result is much smaller than
// their factors.
using wide_real = __float128;

struct WideElem {
    wide_real a = 1, b = 0, c = 0, d = 1;

    static WideElem from(const GroupElem& g) { return {g.a, g.b, g.c, g.d}; }
    GroupElem narrow() const {
        return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c),
                static_cast<double>(d)};
    }
    // Exact for det 1, which the twists preserve up to binary128 rounding.
    WideElem inverse() const { return {d, -b, -c, a}; }

    /// Rescaled to det 1 in binary128; 1/sqrt(det) from a double seed plus
    /// two Newton steps.
    WideElem normalized() const {
        const wide_real det = a * d - b * c;
        wide_real s = 1.0 / std::sqrt(static_cast<double>(det));
        for (int i = 0; i < 2; ++i) s = s * (3 - det * s * s) / 2;
        return {a * s, b * s, c * s, d * s};
    }
};

inline WideElem multiply(const WideElem& m, const WideElem& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
            m.c * n.b + m.d * n.d};
}

/// ghg^-1h^-1 in binary128, rounded once.
inline GroupElem wide_commutator(const WideElem& g, const WideElem& h) {
    const WideElem gn = g.normalized(), hn = h.normalized();
    return multiply(multiply(gn, hn), multiply(gn.inverse(), hn.inverse())).normalized().narrow();
}

/// [g,h] = g h g^-1 h^-1, the convention used throughout the library. The
/// entries cancel by a factor of about |g|^2 |h|^2, so the product is formed
/// in binary128.
inline GroupElem commutator(const GroupElem& g, const GroupElem& h) {
    return wide_commutator(WideElem::from(g), WideElem::from(h));
}

inline GroupElem conjugate(const GroupElem& g, const GroupElem& k) {
    return compose(compose(k, g), k.inverse());
}

inline double entrywise_distance(const GroupElem& g, const GroupElem& h) {
    return std::max({std::abs(g.a - h.a), std::abs(g.b - h.b), std::abs(g.c - h.c),
                     std::abs(g.d - h.d)});
}

/// min(|g - h|_inf, |g + h|_inf) after det normalization.
inline double projective_distance(const GroupElem& g, const GroupElem& h) {
    const GroupElem gn = g.normalized(), hn = h.normalized();
    return std::min(entrywise_distance(gn, hn), entrywise_distance(gn, -hn));
}

inline bool projectively_equal(const GroupElem& g, const GroupElem& h,
                               double tol = kProjectiveTolerance) {
    return projective_distance(g, h) < tol;
}

inline bool is_central(const GroupElem& g, double tol = kProjectiveTolerance) {
    return projectively_equal(g, GroupElem::identity(), tol);
}

enum class ElementClass { Elliptic, Parabolic, Hyperbolic, Central };

constexpr std::string_view to_string(ElementClass c) {
    switch (c) {
        case ElementClass::Elliptic: return "Elliptic";
        case ElementClass::Parabolic: return "Parabolic";
        case ElementClass::Hyperbolic: return "Hyperbolic";
        case ElementClass::Central: return "Central";
    }
    return "Unknown";
}

/// Conjugacy type from |tr|; a band of width kParabolicBand around 2 counts
/// as parabolic so that ties resolve deterministically.
inline ElementClass classify(const GroupElem& g) {
    if (is_central(g)) return ElementClass::Central;
    const double t = std::abs(g.trace());
    if (std::abs(t - 2.0) <= kParabolicBand) return ElementClass::Parabolic;
    return t < 2.0 ? ElementClass::Elliptic : ElementClass::Hyperbolic;
}

inline bool is_elliptic(const GroupElem& g) { return classify(g) == ElementClass::Elliptic; }

/// SU(1,1) form [[alpha, beta], [conj(beta), conj(alpha)]] obtained by
/// conjugating with the Cayley map z -> (z - i)/(z + i).
struct DiskElem {
    std::complex<double> alpha{1.0, 0.0};
    std::complex<double> beta{0.0, 0.0};

    double det() const { return std::norm(alpha) - std::norm(beta); }
    double trace() const { return 2.0 * alpha.real(); }

    /// Action on a point of the closed disk.
    std::complex<double> apply(std::complex<double> w) const {
        return (alpha * w + beta) / (std::conj(beta) * w + std::conj(alpha));
    }
};

inline DiskElem cayley_to_disk(const GroupElem& g) {
    return {{0.5 * (g.a + g.d), 0.5 * (g.b - g.c)}, {0.5 * (g.a - g.d), -0.5 * (g.b + g.c)}};
}

inline GroupElem cayley_from_disk(const DiskElem& m) {
    const double ar = m.alpha.real(), ai = m.alpha.imag();
    const double br = m.beta.real(), bi = m.beta.imag();
    return {ar + br, ai - bi, -ai - bi, ar - br};
}

inline double wrap_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

/// Argument of g . e^{i theta} in the disk model, in [0, 2 pi).
inline double boundary_angle(const GroupElem& g, double theta) {
    const DiskElem m = cayley_to_disk(g);
    const std::complex<double> w = m.apply(std::polar(1.0, theta));
    return wrap_angle(std::arg(w));
}

namespace detail {

// exp of [[a, b], [c, -a]] via x^2 = -det(x) I.
inline GroupElem exp_traceless(double a, double b, double c) {
    const double delta = -a * a - b * c;  // det x
    double cs, sn;                        // exp = cs I + sn x
    if (std::abs(delta) < 1e-8) {
        // Taylor: cos(r) = 1 - d/2 + d^2/24, sin(r)/r = 1 - d/6 + d^2/120.
        cs = 1.0 - delta / 2.0 + delta * delta / 24.0 - delta * delta * delta / 720.0;
        sn = 1.0 - delta / 6.0 + delta * delta / 120.0 - delta * delta * delta / 5040.0;
    } else if (delta > 0.0) {
        const double r = std::sqrt(delta);
        cs = std::cos(r);
        sn = std::sin(r) / r;
    } else {
        const double r = std::sqrt(-delta);
        cs = std::cosh(r);
        sn = std::sinh(r) / r;
    }
    return GroupElem{cs + sn * a, sn * b, sn * c, cs - sn * a}.normalized();
}

}  // namespace detail

inline constexpr int kRandomElementBudget = 10000;

/// Sample exp(X) R(u): X traceless with N(0, scale^2) entries, u uniform.
/// With a class hint, elliptic/hyperbolic are rejection sampled, parabolic
/// and central are constructed directly.
template <class Engine>
GroupElem random_element(Engine& rng, std::optional<ElementClass> hint = std::nullopt,
                         double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    auto draw = [&] {
        const GroupElem e = detail::exp_traceless(normal(rng), normal(rng), normal(rng));
        return compose(e, GroupElem::rotation(angle(rng)));
    };
    if (!hint) return draw();
    switch (*hint) {
        case ElementClass::Central:
            return std::bernoulli_distribution(0.5)(rng) ? GroupElem::identity()
                                                         : -GroupElem::identity();
        case ElementClass::Parabolic: {
            double s = 0.0;
            while (std::abs(s) < 1e-3) s = normal(rng);
            const GroupElem p{1.0, s, 0.0, 1.0};
            return conjugate(std::bernoulli_distribution(0.5)(rng) ? p : -p, draw());
        }
        default:
            for (int i = 0; i < kRandomElementBudget; ++i) {
                const GroupElem g = draw();
                if (classify(g) == *hint) return g;
            }
            throw Error(ErrorCode::RejectionBudgetExhausted,
                        "no sample of the requested class");
    }
}

inline GroupElem random_element(std::uint64_t seed,
                                std::optional<ElementClass> hint = std::nullopt,
                                double scale = 1.0) {
    std::mt19937_64 rng(seed);
    return random_element(rng, hint, scale);
}

}  // namespace onehole
