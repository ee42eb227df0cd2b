#pragma once

// Self-checks of the identities the library relies on, as a ledger of named
// checks. Failures are recorded, never thrown.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "onehole/character.hpp"
#include "onehole/cover.hpp"
#include "onehole/experiment.hpp"
#include "onehole/fiber.hpp"
#include "onehole/lie.hpp"
#include "onehole/mobius.hpp"
#include "onehole/twist.hpp"

namespace onehole {

struct LedgerEntry {
    std::string suite;
    std::string check;
    bool passed = false;
    long samples = 0;
    double worst = 0.0;      // largest observed error, or failure count
    double tolerance = 0.0;
    std::string note;
};

using DpFunction = std::function<DpMatrix(const GroupElem&, const GroupElem&)>;

struct VerifyOptions {
    std::uint64_t seed = 1;
    /// Multiplies every sample count; 1.0 is the default suite size.
    double scale = 1.0;
    DpFunction dp = [](const GroupElem& g, const GroupElem& h) { return dp_map(g, h); };
};

inline const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names{"mobius", "lie", "cover", "character", "twist",
                                                "fiber"};
    return names;
}

namespace detail {

class Checker {
public:
    Checker(std::string suite, std::vector<LedgerEntry>& out) : suite_(std::move(suite)), out_(out) {}

    /// Error-bound check: passes when every observation is below tol.
    void bound(const std::string& name, long n, double worst, double tol, std::string note = {}) {
        out_.push_back({suite_, name, worst < tol, n, worst, tol, std::move(note)});
    }
    /// Count check: passes when no sample failed.
    void count(const std::string& name, long n, long failures, std::string note = {}) {
        out_.push_back({suite_, name, failures == 0, n, static_cast<double>(failures), 0.0,
                        std::move(note)});
    }

private:
    std::string suite_;
    std::vector<LedgerEntry>& out_;
};

inline long scaled(long n, double s) { return std::max<long>(1, std::lround(n * s)); }

/// Random letters from kWalkLetters, rejecting any letter that would push
/// the pair entries beyond `limit`.
template <class Engine>
std::vector<Move> bounded_word(Engine& rng, const PairState& s, int length, double limit) {
    std::vector<Move> word;
    WidePair w = WidePair::from(s);
    for (int i = 0; i < length; ++i) {
        std::array<Move, 4> ok{};
        std::size_t k = 0;
        for (Move m : kWalkLetters) {
            const PairState n = apply_twist(m, w).narrow();
            if (std::max(n.g.norm_inf(), n.h.norm_inf()) <= limit) ok[k++] = m;
        }
        if (k == 0) break;
        const Move m = ok[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)];
        w = apply_twist(m, w);
        word.insert(word.begin(), m);  // written order: latest letter first
    }
    return word;
}

inline double fd_dp_error(const DpFunction& dp, const GroupElem& g, const GroupElem& h,
                          const AlgVec& xi, const AlgVec& eta) {
    const double s = 1e-5;
    const GroupElem base_inv = commutator(g, h).inverse();
    const auto curve = [&](double t) {
        const GroupElem gt = compose(g, exp_alg(t * xi)), ht = compose(h, exp_alg(t * eta));
        return compose(base_inv, commutator(gt, ht));
    };
    const GroupElem plus = curve(s), minus = curve(-s);
    const AlgVec fd{(plus.a - minus.a - plus.d + minus.d) / (4.0 * s), (plus.b - minus.b) / (2.0 * s),
                    (plus.c - minus.c) / (2.0 * s)};
    Eigen::Matrix<double, 6, 1> v;
    v << xi.a, xi.b, xi.c, eta.a, eta.b, eta.c;
    const Eigen::Vector3d formula = dp(g, h) * v;
    return (formula - fd.coords()).norm() / std::max(1e-12, fd.coords().norm());
}

}  // namespace detail

inline std::vector<LedgerEntry> verify_mobius(const VerifyOptions& o) {
    std::vector<LedgerEntry> out;
    detail::Checker ck("mobius", out);
    std::mt19937_64 rng(o.seed);
    const long n = detail::scaled(10000, o.scale);
    double det_err = 0.0, comm_err = 0.0;
    long class_fail = 0;
    for (long i = 0; i < n; ++i) {
        const GroupElem g = random_element(rng), h = random_element(rng), k = random_element(rng);
        det_err = std::max(det_err, std::abs(compose(g, h).det() - 1.0));
        comm_err = std::max(comm_err, projective_distance(
                                          compose(commutator(g, h), commutator(h, g)), {}));
        if (classify(conjugate(g, k)) != classify(g)) ++class_fail;
    }
    ck.bound("compose_det", n, det_err, 1e-9);
    ck.bound("commutator_inverse", n, comm_err, 1e-8);
    ck.count("classify_conjugation", n, class_fail);

    const long m = detail::scaled(100, o.scale);
    double degree_err = 0.0;
    for (long i = 0; i < m; ++i) {
        const GroupElem g = random_element(rng);
        double total = 0.0, prev = boundary_angle(g, 0.0);
        for (int j = 1; j <= 1024; ++j) {
            const double cur = boundary_angle(g, kTwoPi * j / 1024.0);
            total += detail::angle_step(prev, cur);
            prev = cur;
        }
        degree_err = std::max(degree_err, std::abs(total - kTwoPi));
    }
    ck.bound("boundary_degree_one", m, degree_err, 1e-9);
    return out;
}

inline std::vector<LedgerEntry> verify_lie(const VerifyOptions& o) {
    std::vector<LedgerEntry> out;
    detail::Checker ck("lie", out);
    std::mt19937_64 rng(o.seed + 1);
    std::normal_distribution<double> gauss;

    const long pairs = detail::scaled(100, o.scale);
    double dp_err = 0.0;
    for (long i = 0; i < pairs; ++i) {
        const GroupElem g = random_element(rng), h = random_element(rng);
        for (int j = 0; j < 10; ++j) {
            const AlgVec xi{gauss(rng), gauss(rng), gauss(rng)};
            const AlgVec eta{gauss(rng), gauss(rng), gauss(rng)};
            dp_err = std::max(dp_err, detail::fd_dp_error(o.dp, g, h, xi, eta));
        }
    }
    ck.bound("dp_finite_difference", pairs * 10, dp_err, 1e-5);

    const long n = detail::scaled(10000, o.scale);
    long dim_fail = 0;
    for (long i = 0; i < n; ++i) {
        const ElementClass cls = static_cast<ElementClass>(i % 3);
        if (centralizer(random_element(rng, cls)).dim != 1) ++dim_fail;
    }
    for (const GroupElem& c : {GroupElem::identity(), -GroupElem::identity()}) {
        if (centralizer(c).dim != 3) ++dim_fail;
    }
    ck.count("centralizer_dimension", n + 2, dim_fail);

    const long r = detail::scaled(1000, o.scale);
    long disagree = 0;
    for (long i = 0; i < r; ++i) {
        const GroupElem g = random_element(rng);
        GroupElem h;
        if (i % 2 == 0) {
            // A commuting partner: a power of g through its centralizer.
            h = exp_alg(gauss(rng) * centralizer(g).basis.front());
        } else {
            h = random_element(rng);
        }
        const bool rank3 = is_regular(g, h);
        const bool noncommuting = !is_central(commutator(g, h), 1e-6);
        const bool trivial_meet = centralizer_intersection_dim(g, h) == 0;
        if (rank3 != noncommuting || rank3 != trivial_meet) ++disagree;
    }
    ck.count("regularity_agreement", r, disagree);

    const long e = detail::scaled(20, o.scale);
    long span_fail = 0;
    double worst_sv = 1.0;
    for (long i = 0; i < e; ++i) {
        const GroupElem g = random_element(rng, ElementClass::Elliptic);
        const GroupElem h = random_element(rng, ElementClass::Elliptic);
        try {
            const EvalSpan s = eval_span(g, h, {o.seed + static_cast<std::uint64_t>(i), true});
            worst_sv = std::min(worst_sv, s.smallest_sv);
            if (s.dim != 3 || !(s.smallest_sv > 1e-6)) ++span_fail;
        } catch (const Error&) {
            ++span_fail;
        }
    }
    ck.count("eval_span_full", e, span_fail, "smallest singular value " + std::to_string(worst_sv));
    return out;
}

inline std::vector<LedgerEntry> verify_cover(const VerifyOptions& o) {
    std::vector<LedgerEntry> out;
    detail::Checker ck("cover", out);
    std::mt19937_64 rng(o.seed + 2);
    std::uniform_int_distribution<int> shift(-3, 3), length(1, 20);

    const long n = detail::scaled(1000, o.scale);
    double indep = 0.0;
    long level_fail = 0, conj_fail = 0;
    double inv_err = 0.0;
    FiberSpec spec;
    spec.t = 10.0;
    spec.count = static_cast<int>(n);
    spec.seed = o.seed + 20;
    const std::vector<FiberSample> samples = sample_fiber(spec);
    for (long i = 0; i < n; ++i) {
        const GroupElem g = random_element(rng), h = random_element(rng);
        const LiftedElem a = lifted_commutator(g, h);
        const LiftedElem b = lifted_commutator(canonical_lift(g).deck_shift(shift(rng)),
                                               canonical_lift(h).deck_shift(shift(rng)));
        indep = std::max({indep, entrywise_distance(a.g, b.g), std::abs(a.w - b.w)});

        const PairState& p = samples[static_cast<std::size_t>(i)].pair;
        const std::vector<Move> word = detail::bounded_word(rng, p, length(rng), 1e5);
        const WidePair q = apply_word(word, WidePair::from(p));
        const LiftedElem before = lifted_commutator(p.g, p.h);
        const LiftedElem after = lifted_commutator(q);
        if (fiber_class(before).level != fiber_class(after).level) ++level_fail;
        inv_err = std::max(inv_err, entrywise_distance(before.g, after.g));

        const GroupElem k = random_element(rng);
        const FiberClass fc = fiber_class(conjugate(p.g, k), conjugate(p.h, k));
        if (fc.level != fiber_class(before).level) ++conj_fail;
    }
    ck.bound("lift_choice_independence", n, indep, 1e-6);
    ck.count("r1_level_under_words", n, level_fail);
    ck.bound("r1_group_part_under_words", n, inv_err, 1e-6);
    ck.count("r1_level_under_conjugation", n, conj_fail);
    return out;
}

inline std::vector<LedgerEntry> verify_character(const VerifyOptions& o) {
    std::vector<LedgerEntry> out;
    detail::Checker ck("character", out);
    std::mt19937_64 rng(o.seed + 3);
    std::uniform_real_distribution<double> box(-5.0, 5.0), octant(-6.0, -2.0);

    const long n = detail::scaled(10000, o.scale);
    double kc = 0.0, eq = 0.0, inv = 0.0;
    long oct_fail = 0;
    for (long i = 0; i < n; ++i) {
        const GroupElem g = random_element(rng), h = random_element(rng);
        const TraceTriple c = chi(g, h);
        kc = std::max(kc, std::abs(commutator(g, h).trace() - kappa(c)));
        const PairState s{g, h};
        for (Move m : kAllMoves) {
            eq = std::max(eq, distance(chi(apply_twist(m, s)), twist_on_traces(m, c)));
        }
        const TraceTriple p{box(rng), box(rng), box(rng)};
        for (Move m : kAllMoves) {
            inv = std::max(inv, std::abs(kappa(twist_on_traces(m, p)) - kappa(p)) /
                                    (1.0 + std::abs(kappa(p))));
        }
        const TraceTriple q{octant(rng), octant(rng), octant(rng)};
        if (!(kappa(q) > 18.0)) ++oct_fail;
    }
    ck.bound("kappa_commutator_identity", n, kc, 1e-8);
    ck.bound("twist_equivariance", n, eq, 1e-8);
    ck.bound("kappa_invariance", n, inv, 1e-9);
    ck.count("octant_above_18", n, oct_fail);

    const long r = detail::scaled(500, o.scale);
    long reach_fail = 0;
    double replay = 0.0;
    std::uniform_real_distribution<double> t_dist(2.5, 17.5);
    for (long i = 0; i < r; ++i) {
        FiberSpec spec;
        spec.t = t_dist(rng);
        spec.seed = o.seed * 7919 + static_cast<std::uint64_t>(i);
        const TraceTriple p = sample_fiber(spec).front().triple;
        try {
            const ReductionResult res = reduce_to_region(p);
            if (res.region != Region::EllipticSlab) ++reach_fail;
            replay = std::max(replay, distance(apply_trace_word(res.word, p), res.q));
        } catch (const Error&) {
            ++reach_fail;
        }
    }
    ck.count("reduction_reaches_slab", r, reach_fail);
    ck.bound("reduction_word_replay", r, replay, 1e-8);
    return out;
}

inline std::vector<LedgerEntry> verify_twist(const VerifyOptions& o) {
    std::vector<LedgerEntry> out;
    detail::Checker ck("twist", out);
    std::mt19937_64 rng(o.seed + 4);
    std::uniform_int_distribution<int> letter(0, 4), length(0, 12);

    const long n = detail::scaled(1000, o.scale);
    long hom_fail = 0;
    for (long i = 0; i < n; ++i) {
        auto word = [&] {
            std::vector<Move> w(static_cast<std::size_t>(length(rng)));
            for (Move& m : w) m = kAllMoves[static_cast<std::size_t>(letter(rng))];
            return TwistWord(w);
        };
        const TwistWord a = word(), b = word();
        const IntMatrix ab = (a * b).induced_matrix();
        if (ab != multiply(a.induced_matrix(), b.induced_matrix())) ++hom_fail;
        const long long d = det(ab);
        if (d != 1 && d != -1) ++hom_fail;
        if (a.in_twist_group() && det(a.induced_matrix()) != 1) ++hom_fail;
    }
    ck.count("induced_matrix_homomorphism", n, hom_fail);

    const long e = detail::scaled(50, o.scale);
    FiberSpec spec;
    spec.t = 10.0;
    spec.count = static_cast<int>(e);
    spec.seed = o.seed + 40;
    long ell_fail = 0;
    for (const FiberSample& s : sample_fiber(spec)) {
        try {
            const FullReduction r = full_reduction(s.pair);
            if (!is_elliptic(r.state.g) || !is_elliptic(r.state.h) ||
                !is_regular(r.state.g, r.state.h)) {
                ++ell_fail;
            }
        } catch (const Error&) {
            ++ell_fail;
        }
    }
    ck.count("full_reduction_elliptic", e, ell_fail);
    return out;
}

inline std::vector<LedgerEntry> verify_fiber(const VerifyOptions& o) {
    std::vector<LedgerEntry> out;
    detail::Checker ck("fiber", out);
    std::mt19937_64 rng(o.seed + 5);
    std::uniform_real_distribution<double> box(-4.0, 4.0), t_dist(-10.0, 30.0);

    const long n = detail::scaled(10000, o.scale);
    double round_trip = 0.0, root_err = 0.0;
    long realized = 0;
    for (long i = 0; i < n; ++i) {
        const double x = box(rng), y = box(rng), t = t_dist(rng);
        for (double z : solve_z(x, y, t)) {
            root_err = std::max(root_err, std::abs(kappa(x, y, z) - t) / (1.0 + std::abs(t)));
            try {
                const TraceTriple p{x, y, z};
                round_trip = std::max(round_trip, distance(chi(fricke_pair(p)), p));
                ++realized;
            } catch (const Error&) {
            }
        }
    }
    ck.bound("solve_z_roots", n, root_err, 1e-9);
    ck.bound("fricke_round_trip", realized, round_trip, 1e-8);
    return out;
}

/// Runs the named suite, or every suite for "all", one worker per suite.
inline std::vector<LedgerEntry> run_verify(const std::string& suite, const VerifyOptions& o = {}) {
    using Fn = std::vector<LedgerEntry> (*)(const VerifyOptions&);
    const std::vector<std::pair<std::string, Fn>> table{
        {"mobius", verify_mobius}, {"lie", verify_lie},     {"cover", verify_cover},
        {"character", verify_character}, {"twist", verify_twist}, {"fiber", verify_fiber}};
    std::vector<std::future<std::vector<LedgerEntry>>> jobs;
    for (const auto& [name, fn] : table) {
        if (suite == "all" || suite == name) {
            jobs.push_back(std::async(std::launch::async, fn, std::cref(o)));
        }
    }
    if (jobs.empty()) throw Error(ErrorCode::InvalidArgument, "unknown suite: " + suite);
    std::vector<LedgerEntry> ledger;
    for (auto& j : jobs) {
        std::vector<LedgerEntry> part = j.get();
        ledger.insert(ledger.end(), part.begin(), part.end());
    }
    return ledger;
}

inline bool all_passed(const std::vector<LedgerEntry>& ledger) {
    return std::all_of(ledger.begin(), ledger.end(), [](const LedgerEntry& e) { return e.passed; });
}

}  // namespace onehole
