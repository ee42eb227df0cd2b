#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "onehole/onehole.hpp"
#include "support/oracles.hpp"

using namespace onehole;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(LiftEval, IdentityIsIdentity) {
    for (double x : {-7.0, -1.0, 0.0, 0.5, 3.0, 12.0}) {
        EXPECT_NEAR(lift_eval({}, x), x, 1e-13);
    }
}

TEST(LiftEval, MatchesClosedForm) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> xs(-15.0, 15.0);
    for (int i = 0; i < 300; ++i) {
        const GroupElem g = random_element(rng, std::nullopt, 1.5);
        const LiftedElem l = canonical_lift(g);
        const double x = xs(rng);
        EXPECT_NEAR(lift_eval(l, x), oracle::pinned_lift(g, l.w, x), 1e-9);
    }
}

TEST(LiftEval, DegreeOne) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> xs(-5.0, 5.0);
    for (int i = 0; i < 300; ++i) {
        const LiftedElem l = canonical_lift(random_element(rng));
        const double x = xs(rng);
        EXPECT_NEAR(lift_eval(l, x + kTwoPi), lift_eval(l, x) + kTwoPi, 1e-9);
    }
}

TEST(LiftEval, MonotoneOnGrid) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const LiftedElem l = canonical_lift(random_element(rng));
        double prev = lift_eval(l, 0.0);
        for (int k = 1; k <= 1024; ++k) {
            const double v = lift_eval(l, kTwoPi * k / 1024.0);
            EXPECT_GT(v, prev);
            prev = v;
        }
    }
}

TEST(LiftEval, SteepHyperbolicStaysCorrect) {
    // Nearly all of the circle is compressed onto the attracting fixed point;
    // the full turn must not be lost.
    const LiftedElem l = canonical_lift(GroupElem::diagonal(1e6));
    EXPECT_NEAR(lift_eval(l, 6.0), oracle::pinned_lift(l.g, l.w, 6.0), 1e-9);
    EXPECT_NEAR(lift_eval(l, 6.0), kTwoPi, 1e-6);
}

TEST(LiftEval, TooSteepThrows) {
    try {
        lift_eval(canonical_lift(GroupElem::diagonal(1e12)), 6.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnwrapResolutionExceeded);
        EXPECT_EQ(e.category(), ErrorCategory::Numerical);
    }
}

TEST(ComposeLifts, IdentityAndProjection) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const GroupElem g = random_element(rng), h = random_element(rng);
        const LiftedElem lg = canonical_lift(g).deck_shift(i % 3 - 1);
        const LiftedElem id{};
        const LiftedElem a = compose_lifts(lg, id), b = compose_lifts(id, lg);
        EXPECT_LT(entrywise_distance(a.g, g), 1e-12);
        EXPECT_NEAR(a.w, lg.w, 1e-12);
        EXPECT_NEAR(b.w, lg.w, 1e-12);
        const LiftedElem p = compose_lifts(lg, canonical_lift(h));
        EXPECT_TRUE(projectively_equal(p.g, compose(g, h)));
        EXPECT_NEAR(wrap_angle(p.w), boundary_angle(compose(g, h), 0.0), 1e-9);
    }
}

TEST(ComposeLifts, DeckElementsAreCentral) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const LiftedElem g = canonical_lift(random_element(rng));
        const LiftedElem h = canonical_lift(random_element(rng));
        EXPECT_NEAR(compose_lifts(g, h.deck_shift(1)).w, compose_lifts(g, h).w + kTwoPi, 1e-9);
        EXPECT_NEAR(compose_lifts(g.deck_shift(-2), h).w, compose_lifts(g, h).w - 2 * kTwoPi, 1e-9);
    }
}

TEST(InverseLift, ComposesToIdentity) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        const LiftedElem g = canonical_lift(random_element(rng)).deck_shift(i % 5 - 2);
        const LiftedElem gi = inverse_lift(g);
        EXPECT_NEAR(compose_lifts(g, gi).w, 0.0, 1e-9);
        EXPECT_NEAR(compose_lifts(gi, g).w, 0.0, 1e-9);
    }
}

TEST(LiftedCommutator, CommutingPairIsIdentityLift) {
    const LiftedElem c = lifted_commutator(GroupElem::diagonal(2.0), GroupElem::diagonal(3.0));
    EXPECT_TRUE(projectively_equal(c.g, GroupElem::identity()));
    EXPECT_NEAR(c.w, 0.0, 1e-12);
    const LiftedElem r = lifted_commutator(GroupElem::rotation(1.0), GroupElem::rotation(2.5));
    EXPECT_NEAR(r.w, 0.0, 1e-12);
}

TEST(LiftedCommutator, IndependentOfLiftChoice) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        const GroupElem g = random_element(rng), h = random_element(rng);
        const LiftedElem a = lifted_commutator(g, h);
        const LiftedElem b = lifted_commutator(canonical_lift(g).deck_shift(2),
                                               canonical_lift(h).deck_shift(-1));
        EXPECT_NEAR(a.w, b.w, 1e-9);
        // Against the closed-form lifts of the four factors.
        const LiftedElem lg = canonical_lift(g), lh = canonical_lift(h);
        const LiftedElem lgi = inverse_lift(lg), lhi = inverse_lift(lh);
        const double w = oracle::pinned_lift(
            g, lg.w, oracle::pinned_lift(h, lh.w, oracle::pinned_lift(lgi.g, lgi.w, lhi.w)));
        EXPECT_NEAR(a.w, w, 1e-9);
    }
}

TEST(LiftedCommutator, WideWindingMatchesDoublePath) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 300; ++i) {
        const GroupElem g = random_element(rng), h = random_element(rng);
        EXPECT_NEAR(commutator_winding(WideElem::from(g), WideElem::from(h)),
                    commutator_winding(canonical_lift(g), canonical_lift(h)), 1e-9);
        EXPECT_NEAR(commutator_winding(WideElem::from(-g), WideElem::from(h)),
                    commutator_winding(canonical_lift(g), canonical_lift(h)), 1e-9);
    }
}

TEST(LiftedCommutator, InvariantUnderTwists) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        const PairState s{random_element(rng), random_element(rng)};
        const LiftedElem before = lifted_commutator(s.g, s.h);
        for (Move m : kWalkLetters) {
            const PairState t = apply_twist(m, s);
            const LiftedElem after = lifted_commutator(t.g, t.h);
            EXPECT_LT(entrywise_distance(before.g, after.g), 1e-8);
            EXPECT_NEAR(before.w, after.w, 1e-8);
        }
    }
}

TEST(ReferenceLift, IdentityAndRotations) {
    EXPECT_NEAR(reference_lift(GroupElem::identity()), 0.0, 1e-15);
    for (double phi : {-2.5, -0.3, 0.0, 0.7, 3.0}) {
        EXPECT_NEAR(reference_lift(GroupElem::rotation(phi)), phi, 1e-12);
    }
    // Positive hyperbolic elements are reached along the symmetric path.
    EXPECT_NEAR(reference_lift(GroupElem::diagonal(3.0)), 0.0, 1e-12);
}

TEST(FiberClass, PairWithIdentity) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
        const FiberClass fc = fiber_class(random_element(rng), GroupElem::identity());
        EXPECT_NEAR(fc.t, 2.0, 1e-12);
        EXPECT_EQ(fc.level, 0);
    }
}

TEST(FiberClass, ZeroTraceIsAmbiguous) {
    const PairState p = fricke_pair({3.0, 3.0, (9.0 + std::sqrt(17.0)) / 2.0});
    ASSERT_LT(std::abs(commutator(p.g, p.h).trace()), 1e-9);
    try {
        fiber_class(p.g, p.h);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ReferencePathAmbiguous);
    }
}

TEST(FiberClass, TraceMatchesKappa) {
    std::mt19937_64 rng(10);
    for (int i = 0; i < 300; ++i) {
        const GroupElem g = random_element(rng), h = random_element(rng);
        const FiberClass fc = fiber_class(g, h);
        EXPECT_NEAR(fc.t, kappa(chi(g, h)), 1e-8 * std::max(1.0, std::abs(fc.t)));
    }
}

// log of the positive-trace representative of a hyperbolic element.
AlgVec hyperbolic_log(GroupElem g) {
    if (g.trace() < 0.0) g = -g;
    const double l = std::acosh(0.5 * g.trace());
    return traceless_part(g) * (l / std::sinh(l));
}

// Level along a path inside one fiber: h slides along the one-parameter
// group of g (which fixes [g,h]) and then the pair is conjugated along
// exp(sX). The lift of the commutator is tracked by continuity and compared
// with the level reported at every step.
TEST(FiberClass, LevelConstantAlongFiberPath) {
    FiberSpec spec;
    spec.t = -1.0;
    spec.count = 4;
    spec.seed = 5;
    std::mt19937_64 rng(11);
    for (const FiberSample& s : sample_fiber(spec)) {
        const PairState start = s.pair;
        ASSERT_EQ(classify(start.g), ElementClass::Hyperbolic);
        const AlgVec lg = hyperbolic_log(start.g);
        const AlgVec lk = traceless_part(random_element(rng, std::nullopt, 0.7));
        const int level0 = fiber_class(start.g, start.h).level;
        double tracked = lifted_commutator(start.g, start.h).w;
        constexpr int kSteps = 1000;
        for (int k = 1; k <= kSteps; ++k) {
            const double u = static_cast<double>(k) / kSteps;
            PairState p{start.g, compose(start.h, exp_alg(lg * (-1.5 * std::min(1.0, 2.0 * u))))};
            if (u > 0.5) p = conjugate(p, exp_alg(lk * (2.0 * u - 1.0)));
            const LiftedElem c = lifted_commutator(p.g, p.h);
            // Nearest lift of the new commutator to the previous tracked value.
            tracked += std::remainder(c.w - tracked, kTwoPi);
            EXPECT_NEAR(c.w, tracked, 1e-6);
            const double ref = reference_lift(c.g);
            EXPECT_EQ(static_cast<int>(std::lround((tracked - ref) / kTwoPi)), level0);
            EXPECT_EQ(fiber_class(c).level, level0);
            EXPECT_NEAR(fiber_class(c).t, -1.0, 1e-6);
        }
    }
}

TEST(FiberClass, SignFromLift) {
    // Pairs on the t = -1 fiber report t = -1 even though tr [g,h] of the
    // chosen matrices could carry either sign.
    FiberSpec spec;
    spec.t = -1.0;
    spec.count = 20;
    for (const FiberSample& s : sample_fiber(spec)) {
        EXPECT_NEAR(fiber_class(s.pair.g, s.pair.h).t, -1.0, 1e-6);
        EXPECT_NEAR(fiber_class(s.pair.g, -s.pair.h).t, -1.0, 1e-6);
    }
}

}  // namespace
