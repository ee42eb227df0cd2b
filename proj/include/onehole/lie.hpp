#pragma once

// sl(2,R): adjoint action, exponential, centralizers, the differential of
// the commutator map p(g,h) = [g,h], and the infinitesimal-transitivity check
// built from centralizer-valued vector fields on G x G.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "onehole/error.hpp"
#include "onehole/mobius.hpp"

namespace onehole {

/// The traceless matrix [[a, b], [c, -a]].
struct AlgVec {
    double a = 0.0, b = 0.0, c = 0.0;

    constexpr AlgVec operator+(const AlgVec& o) const { return {a + o.a, b + o.b, c + o.c}; }
    constexpr AlgVec operator-(const AlgVec& o) const { return {a - o.a, b - o.b, c - o.c}; }
    constexpr AlgVec operator-() const { return {-a, -b, -c}; }
    constexpr AlgVec operator*(double s) const { return {a * s, b * s, c * s}; }
    constexpr double det() const { return -a * a - b * c; }
    double norm() const { return std::sqrt(a * a + b * b + c * c); }

    Eigen::Vector3d coords() const { return {a, b, c}; }
    static AlgVec from_coords(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }

    static constexpr AlgVec basis(int i) {
        return i == 0 ? AlgVec{1, 0, 0} : i == 1 ? AlgVec{0, 1, 0} : AlgVec{0, 0, 1};
    }
};

constexpr AlgVec operator*(double s, const AlgVec& x) { return x * s; }

inline double distance(const AlgVec& x, const AlgVec& y) { return (x - y).norm(); }

/// [x, y] = xy - yx.
constexpr AlgVec bracket(const AlgVec& x, const AlgVec& y) {
    return {x.b * y.c - y.b * x.c, 2.0 * (x.a * y.b - y.a * x.b), 2.0 * (y.a * x.c - x.a * y.c)};
}

/// Ad_g x = g x g^-1.
inline AlgVec adjoint(const GroupElem& g, const AlgVec& x) {
    const GroupElem gi = g.inverse();
    // (g x) as a plain matrix, then times g^-1.
    const double m00 = g.a * x.a + g.b * x.c, m01 = g.a * x.b - g.b * x.a;
    const double m10 = g.c * x.a + g.d * x.c, m11 = g.c * x.b - g.d * x.a;
    const double r00 = m00 * gi.a + m01 * gi.c, r01 = m00 * gi.b + m01 * gi.d;
    const double r10 = m10 * gi.a + m11 * gi.c, r11 = m10 * gi.b + m11 * gi.d;
    return {0.5 * (r00 - r11), r01, r10};
}

/// Matrix of Ad_g in the basis (e_a, e_b, e_c).
inline Eigen::Matrix3d adjoint_matrix(const GroupElem& g) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i) m.col(i) = adjoint(g, AlgVec::basis(i)).coords();
    return m;
}

inline GroupElem exp_alg(const AlgVec& x) { return detail::exp_traceless(x.a, x.b, x.c); }

/// Traceless part g - (tr g / 2) I, which always commutes with g.
inline AlgVec traceless_part(const GroupElem& g) { return {0.5 * (g.a - g.d), g.b, g.c}; }

// ---------------------------------------------------------------------------
// Centralizers

struct CentralizerBasis {
    int dim = 0;
    std::vector<AlgVec> basis;
};

/// g^g: all of g for central g, otherwise spanned by the normalized
/// traceless part of g.
inline CentralizerBasis centralizer(const GroupElem& g) {
    if (is_central(g)) {
        return {3, {AlgVec::basis(0), AlgVec::basis(1), AlgVec::basis(2)}};
    }
    const AlgVec v = traceless_part(g);
    return {1, {v * (1.0 / v.norm())}};
}

// ---------------------------------------------------------------------------
// Elliptic rotation data

/// Positively oriented unit generator J of the centralizer of an elliptic g:
/// J^2 = -I, and g = cos(u) I + sin(u) J for the SL representative.
/// J depends only on the fixed point, so it is the same for g and -g.
inline AlgVec rotation_generator(const GroupElem& g) {
    const AlgVec y = traceless_part(g);
    const double dy = y.det();
    if (!(dy > 0.0)) throw Error(ErrorCode::NotElliptic, "rotation generator needs |tr| < 2");
    const double orient = (y.b - y.c) > 0.0 ? 1.0 : -1.0;
    return y * (orient / std::sqrt(dy));
}

/// Angle u in (-pi, pi] with g = cos(u) I + sin(u) J. This is the angle of
/// the given SL representative; the disk rotation angle is 2u mod 2 pi.
inline double rotation_angle(const GroupElem& g) {
    const AlgVec y = traceless_part(g);
    const double dy = y.det();
    if (!(dy > 0.0)) throw Error(ErrorCode::NotElliptic, "rotation angle needs |tr| < 2");
    const double orient = (y.b - y.c) > 0.0 ? 1.0 : -1.0;
    return std::atan2(orient * std::sqrt(dy), 0.5 * g.trace());
}

inline constexpr int kTorsionMaxDenominator = 100;
inline constexpr double kTorsionTolerance = 1e-6;

/// Rotation number in [0, 1) of the PSL element: (disk angle) / 2 pi.
inline double rotation_number(const GroupElem& g) {
    const double u = rotation_angle(g);
    double r = std::fmod(u / std::numbers::pi, 1.0);
    if (r < 0.0) r += 1.0;
    return r;
}

/// Elliptic with rotation number at least kTorsionTolerance away from every
/// p/q, q <= kTorsionMaxDenominator.
inline bool is_non_torsion(const GroupElem& g) {
    if (!is_elliptic(g)) return false;
    const double r = rotation_number(g);
    for (int q = 1; q <= kTorsionMaxDenominator; ++q) {
        const double p = std::round(r * q);
        if (std::abs(r - p / q) <= kTorsionTolerance) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Differential of the commutator map

using DpMatrix = Eigen::Matrix<double, 3, 6>;

inline constexpr double kRankThreshold = 1e-7;

/// (xi, eta) -> Ad(hgh^-1) xi - Ad(hg) xi + Ad(hg) eta - Ad(h) eta, the
/// left-trivialized derivative of (g,h) -> [g,h].
inline DpMatrix dp_map(const GroupElem& g, const GroupElem& h) {
    const GroupElem hg = compose(h, g);
    const GroupElem hgh = compose(hg, h.inverse());
    const Eigen::Matrix3d ad_hgh = adjoint_matrix(hgh);
    const Eigen::Matrix3d ad_hg = adjoint_matrix(hg);
    const Eigen::Matrix3d ad_h = adjoint_matrix(h);
    DpMatrix m;
    m.leftCols<3>() = ad_hgh - ad_hg;
    m.rightCols<3>() = ad_hg - ad_h;
    return m;
}

/// Number of singular values above kRankThreshold times the largest.
template <class Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m, double rel = kRankThreshold) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.template cast<double>().eval());
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv(i) > rel * sv(0) ? 1 : 0;
    return r;
}

/// [Ad(h^-1) - I | I - Ad(g^-1)]. dp_map = Ad(hg) times this, so both share
/// rank and kernel, but this factor avoids the |hgh^-1|^2 entries that make
/// dp_map itself badly scaled.
inline DpMatrix dp_reduced(const GroupElem& g, const GroupElem& h) {
    const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
    DpMatrix m;
    m.leftCols<3>() = adjoint_matrix(h.inverse()) - id;
    m.rightCols<3>() = id - adjoint_matrix(g.inverse());
    return m;
}

inline bool is_regular(const GroupElem& g, const GroupElem& h) {
    return numerical_rank(dp_reduced(g, h)) == 3;
}

/// Orthonormal basis (columns) of Kernel(dp_map(g,h)) in g + g.
inline Eigen::Matrix<double, 6, 3> kernel_dp(const GroupElem& g, const GroupElem& h) {
    const DpMatrix m = dp_reduced(g, h);
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 6>> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(2) > kRankThreshold * sv(0))) {
        throw Error(ErrorCode::NonRegularPoint, "dp has rank < 3 at this pair");
    }
    return svd.matrixV().rightCols<3>();
}

/// Dimension of g^g intersect g^h.
inline constexpr double kIntersectionThreshold = 1e-8;

inline int centralizer_intersection_dim(const GroupElem& g, const GroupElem& h) {
    const CentralizerBasis cg = centralizer(g), ch = centralizer(h);
    Eigen::MatrixXd m(3, cg.dim + ch.dim);
    int col = 0;
    for (const AlgVec& v : cg.basis) m.col(col++) = v.coords();
    for (const AlgVec& v : ch.basis) m.col(col++) = v.coords();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        rank += svd.singularValues()(i) > kIntersectionThreshold ? 1 : 0;
    }
    return cg.dim + ch.dim - rank;
}

// ---------------------------------------------------------------------------
// Centralizer-valued fields x : G -> g with Ad_g x(g) = x(g)

struct FieldProfile {
    double constant = 1.0;
    /// Multiply by a smooth bump in tr^2/4 supported on the elliptic set.
    bool bump = true;
    /// Symmetric quadratic form on the entries (a, b, c, d), upper triangle
    /// in row order. Quadratic so that the profile is even under g -> -g.
    std::array<double, 10> quadratic{};
};

class LocalField {
public:
    LocalField() = default;
    LocalField(const GroupElem& base, FieldProfile profile)
        : base_(base), profile_(profile) {}

    /// Random smooth profile with support in the elliptic set.
    template <class Engine>
    static LocalField random(const GroupElem& base, Engine& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        FieldProfile p;
        p.constant = 1.0 + std::abs(normal(rng));
        p.bump = true;
        for (double& q : p.quadratic) q = 0.3 * normal(rng);
        return LocalField(base, p);
    }

    const GroupElem& base() const { return base_; }
    const FieldProfile& profile() const { return profile_; }
    AlgVec value() const { return (*this)(base_); }

    double scalar(const GroupElem& g) const {
        double s = profile_.constant;
        const std::array<double, 4> e{g.a, g.b, g.c, g.d};
        int k = 0;
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) s += profile_.quadratic[k++] * e[i] * e[j];
        }
        if (profile_.bump) {
            const double u = 0.25 * g.trace() * g.trace();
            if (u >= 1.0) return 0.0;
            s *= std::exp(1.0 - 1.0 / (1.0 - u));
        }
        return s;
    }

    /// x(g) = scalar(g) J_g, zero off the elliptic set.
    AlgVec operator()(const GroupElem& g) const {
        if (!(traceless_part(g).det() > 0.0)) return {};
        return rotation_generator(g) * scalar(g);
    }

private:
    GroupElem base_{};
    FieldProfile profile_{};
};

/// A vector field (x(h), y(g)) on G x G: the g-slot is driven by a field
/// evaluated at h and the h-slot by a field evaluated at g.
struct PairField {
    LocalField on_h;  // x, evaluated at h, moves g
    LocalField on_g;  // y, evaluated at g, moves h
    bool has_h = true;
    bool has_g = true;

    AlgVec g_component(const GroupElem& h) const { return has_h ? on_h(h) : AlgVec{}; }
    AlgVec h_component(const GroupElem& g) const { return has_g ? on_g(g) : AlgVec{}; }
};

inline constexpr double kFiniteDifferenceStep = 1e-5;

/// d/dt f(p e^{t v}) at t = 0 by central differences.
inline AlgVec directional_derivative(const LocalField& f, const GroupElem& p, const AlgVec& v,
                                     bool active = true) {
    if (!active) return {};
    const double nv = v.norm();
    if (nv == 0.0) return {};
    const double step = kFiniteDifferenceStep / std::max(1.0, nv * p.norm_inf());
    if (step < 1e-12) throw Error(ErrorCode::StepSizeUnderflow, "direction too large");
    const AlgVec fp = f(compose(p, exp_alg(v * step)));
    const AlgVec fm = f(compose(p, exp_alg(v * -step)));
    return (fp - fm) * (0.5 / step);
}

/// Bracket of (x1(h), y1(g)) and (x2(h), y2(g)) at (g, h):
///   ( dx2|_h(y1(g)) - dx1|_h(y2(g)),  dy2|_g(x1(h)) - dy1|_g(x2(h)) ).
/// The pointwise commutator term vanishes since both values lie in the same
/// one-dimensional centralizer.
inline std::pair<AlgVec, AlgVec> field_bracket(const PairField& X, const PairField& Y,
                                               const GroupElem& g, const GroupElem& h) {
    if (!is_elliptic(g) || !is_elliptic(h)) {
        throw Error(ErrorCode::NotElliptic, "field bracket is evaluated on Ell x Ell");
    }
    const AlgVec y1 = X.h_component(g), y2 = Y.h_component(g);
    const AlgVec x1 = X.g_component(h), x2 = Y.g_component(h);
    const AlgVec first = directional_derivative(Y.on_h, h, y1, Y.has_h) -
                         directional_derivative(X.on_h, h, y2, X.has_h);
    const AlgVec second = directional_derivative(Y.on_g, g, x1, Y.has_g) -
                          directional_derivative(X.on_g, g, x2, X.has_g);
    return {first, second};
}

/// ([x1(h), x2(h)], [y1(g), y2(g)]).
inline std::pair<AlgVec, AlgVec> pointwise_commutator(const PairField& X, const PairField& Y,
                                                      const GroupElem& g, const GroupElem& h) {
    return {bracket(X.g_component(h), Y.g_component(h)),
            bracket(X.h_component(g), Y.h_component(g))};
}

struct EvalSpan {
    int dim = 0;
    double smallest_sv = 0.0;     // of the unit-normalized generators in Kernel(dp)
    double kernel_residual = 0.0; // max distance of a generator from Kernel(dp)
};

struct EvalOptions {
    std::uint64_t seed = 1;
    bool include_bracket = true;
};

/// Evaluates generators of the twist-flow Lie algebra at (g, h): the
/// centralizer directions (u, 0), u in g^h and (0, v), v in g^g, plus the
/// bracket of (0, y1(g)) with (x2(h), 0), and reports the dimension of their
/// span inside Kernel(dp).
inline EvalSpan eval_span(const GroupElem& g, const GroupElem& h, const EvalOptions& opts = {}) {
    if (!is_elliptic(g) || !is_elliptic(h)) {
        throw Error(ErrorCode::NotElliptic, "eval_span needs an elliptic pair");
    }
    if (is_central(commutator(g, h), 1e-6)) {
        throw Error(ErrorCode::CommutingPair, "[g,h] = 1");
    }
    std::vector<Eigen::Matrix<double, 6, 1>> gens;
    auto push = [&](const AlgVec& xi, const AlgVec& eta) {
        Eigen::Matrix<double, 6, 1> v;
        v << xi.a, xi.b, xi.c, eta.a, eta.b, eta.c;
        const double n = v.norm();
        if (n > 0.0) gens.push_back(v / n);
    };
    push(centralizer(h).basis.front(), {});
    push({}, centralizer(g).basis.front());
    if (opts.include_bracket) {
        std::mt19937_64 rng(opts.seed);
        PairField X{{}, LocalField::random(g, rng), false, true};   // (0, y1(g))
        PairField Y{LocalField::random(h, rng), {}, true, false};   // (x2(h), 0)
        const auto [first, second] = field_bracket(X, Y, g, h);
        push(first, second);
    }

    const Eigen::Matrix<double, 6, 3> kernel = kernel_dp(g, h);
    Eigen::MatrixXd gm(6, static_cast<Eigen::Index>(gens.size()));
    for (std::size_t i = 0; i < gens.size(); ++i) gm.col(static_cast<Eigen::Index>(i)) = gens[i];
    const Eigen::MatrixXd coords = kernel.transpose() * gm;
    const Eigen::MatrixXd residual = gm - kernel * coords;

    EvalSpan out;
    out.kernel_residual = residual.cwiseAbs().maxCoeff();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(coords);
    const auto& sv = svd.singularValues();
    out.smallest_sv = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) out.dim += sv(i) > kRankThreshold * sv(0) ? 1 : 0;
    return out;
}

}  // namespace onehole
