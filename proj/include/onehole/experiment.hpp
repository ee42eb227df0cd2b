#pragma once

// Orbit walks, equidistribution and discreteness diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "onehole/character.hpp"
#include "onehole/cover.hpp"
#include "onehole/error.hpp"
#include "onehole/fiber.hpp"
#include "onehole/twist.hpp"

namespace onehole {

enum class WalkScheme {
    /// Uniform over the twist letters whose image stays within `bound`.
    Confined,
    /// I.i.d. uniform over T1, T1i, T2, T2i. Escapes to overflow quickly.
    Uniform,
    /// The letters of `word`, repeated; one period applies the whole word.
    FixedWord,
};

constexpr std::string_view to_string(WalkScheme s) {
    switch (s) {
        case WalkScheme::Confined: return "confined";
        case WalkScheme::Uniform: return "uniform";
        case WalkScheme::FixedWord: return "fixed";
    }
    return "?";
}

inline std::optional<WalkScheme> parse_scheme(std::string_view s) {
    for (WalkScheme w : {WalkScheme::Confined, WalkScheme::Uniform, WalkScheme::FixedWord}) {
        if (to_string(w) == s) return w;
    }
    return std::nullopt;
}

enum class WalkLevel { Trace, Matrix };

struct ExperimentConfig {
    double t = 10.0;
    std::optional<int> level;
    long steps = 1000;
    WalkScheme scheme = WalkScheme::Confined;
    std::vector<Move> word;
    double bound = 20.0;
    WalkLevel walk = WalkLevel::Trace;
    std::uint64_t seed = 1;
    int bins = 8;
    double window = 2.0;
    long budget = 100000;

    void validate() const {
        if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
        if (bins < 2) throw Error(ErrorCode::InvalidArgument, "bins must be >= 2");
        if (!(window > 0.0)) throw Error(ErrorCode::InvalidArgument, "window must be positive");
        if (!(bound > 2.0)) throw Error(ErrorCode::InvalidArgument, "bound must exceed 2");
        if (scheme == WalkScheme::FixedWord) {
            if (word.empty()) throw Error(ErrorCode::InvalidArgument, "fixed scheme needs a word");
            TwistWord check(word);
            if (!check.in_twist_group()) {
                throw Error(ErrorCode::InvalidArgument, "walk letters must be T1, T1i, T2, T2i");
            }
        }
    }
};

struct OrbitRecord {
    long step = 0;
    std::optional<Move> letter;  // empty for the starting point
    TraceTriple triple;
    double kappa = 0.0;
    int level = 0;
};

struct OrbitResult {
    std::vector<OrbitRecord> records;
    PairState start;
    int level = 0;
    /// max |kappa - kappa_0| / max(1, |kappa_0|) over the stream.
    double max_relative_drift = 0.0;
    bool level_constant = true;
    /// Set when the walk left the floating-point range and was truncated.
    std::optional<long> escaped_at;
};

inline constexpr double kEscapeThreshold = 1e100;
inline constexpr double kBalanceThreshold = 64.0;

inline const std::array<Move, 4> kWalkLetters{Move::T1, Move::T1Inv, Move::T2, Move::T2Inv};

namespace detail {

class LetterSource {
public:
    LetterSource(const ExperimentConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {}

    Move next(long step, const TraceTriple& at) {
        switch (cfg_.scheme) {
            case WalkScheme::Uniform: return kWalkLetters[pick(4)];
            case WalkScheme::FixedWord: {
                const auto n = static_cast<long>(cfg_.word.size());
                return cfg_.word[static_cast<std::size_t>(n - 1 - step % n)];
            }
            case WalkScheme::Confined: break;
        }
        std::array<Move, 4> ok{};
        std::size_t k = 0;
        Move fallback = kWalkLetters[0];
        double lowest = std::numeric_limits<double>::infinity();
        for (Move m : kWalkLetters) {
            const double size = twist_on_traces(m, at).max_abs();
            if (size <= cfg_.bound) ok[k++] = m;
            if (size < lowest) {
                lowest = size;
                fallback = m;
            }
        }
        return k == 0 ? fallback : ok[pick(k)];
    }

private:
    std::size_t pick(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    }

    const ExperimentConfig& cfg_;
    std::mt19937_64 rng_;
};

}  // namespace detail

inline PairState orbit_start(const ExperimentConfig& cfg) {
    FiberSpec spec;
    spec.t = cfg.t;
    spec.level = cfg.level;
    spec.count = 1;
    spec.seed = cfg.seed;
    spec.budget = cfg.budget;
    return sample_fiber(spec).front().pair;
}

/// A walk from `start` (or from a fiber sample when absent). Trace walks
/// iterate the polynomial maps and carry the starting level, which the
/// twists preserve; matrix walks choose letters from their own traces,
/// rebalance when entries grow, and measure the level at every step.
inline OrbitResult run_orbit(const ExperimentConfig& cfg,
                             std::optional<PairState> start = std::nullopt) {
    cfg.validate();
    OrbitResult out;
    out.start = start ? *start : orbit_start(cfg);
    out.level = fiber_class(out.start.g, out.start.h).level;
    detail::LetterSource letters(cfg, cfg.seed ^ 0x9e3779b97f4a7c15ULL);

    PairState pair = balance(out.start);
    TraceTriple p = chi(pair);
    const double k0 = kappa(p);
    const double scale = std::max(1.0, std::abs(k0));
    out.records.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    out.records.push_back({0, std::nullopt, p, k0, out.level});

    for (long step = 1; step <= cfg.steps; ++step) {
        const Move m = letters.next(step - 1, p);
        int level = out.level;
        if (cfg.walk == WalkLevel::Trace) {
            p = twist_on_traces(m, p);
        } else {
            pair = apply_twist(m, pair);
            if (std::max(pair.g.norm_inf(), pair.h.norm_inf()) > kBalanceThreshold) {
                pair = balance(pair);
            }
            p = chi(pair);
        }
        if (!(p.max_abs() < kEscapeThreshold)) {
            out.escaped_at = step;
            break;
        }
        if (cfg.walk == WalkLevel::Matrix) {
            level = fiber_class(pair.g, pair.h).level;
            if (level != out.level) out.level_constant = false;
        }
        const double k = kappa(p);
        out.max_relative_drift = std::max(out.max_relative_drift, std::abs(k - k0) / scale);
        out.records.push_back({step, m, p, k, level});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equidistribution

inline constexpr double kShellWidth = 1e-3;
inline constexpr long kMinWindowSamples = 100;

struct Histogram {
    int bins = 0;
    double window = 0.0;
    std::vector<long> counts;  // bins^3, x fastest
    long hits = 0;
};

inline Histogram histogram(const std::vector<OrbitRecord>& records, double t, int bins,
                           double window) {
    Histogram h{bins, window, std::vector<long>(static_cast<std::size_t>(bins) * bins * bins, 0),
                0};
    const auto cell = [&](double v) {
        const int i = static_cast<int>(std::floor((v + window) / (2.0 * window) * bins));
        return std::clamp(i, 0, bins - 1);
    };
    for (const OrbitRecord& r : records) {
        const TraceTriple& p = r.triple;
        if (p.max_abs() > window || std::abs(kappa(p) - t) > kShellWidth) continue;
        const std::size_t idx =
            static_cast<std::size_t>((cell(p.z) * bins + cell(p.y)) * bins + cell(p.x));
        ++h.counts[idx];
        ++h.hits;
    }
    return h;
}

/// Half the L1 distance between the normalized histograms.
inline double total_variation(const Histogram& a, const Histogram& b) {
    if (a.hits == 0 || b.hits == 0)
        throw Error(ErrorCode::InsufficientSamples, "empty histogram");
    double s = 0.0;
    for (std::size_t i = 0; i < a.counts.size(); ++i) {
        s += std::abs(static_cast<double>(a.counts[i]) / a.hits -
                      static_cast<double>(b.counts[i]) / b.hits);
    }
    return 0.5 * s;
}

struct EquidistReport {
    std::uint64_t seed_a = 0, seed_b = 0;
    Histogram a, b;
    double distance = 0.0;
};

/// Two walks with independent seeds, binned over the window cube on the
/// kappa = t shell. Exploratory only: no threshold is implied.
inline EquidistReport equidistribution(const ExperimentConfig& cfg, std::uint64_t seed_b) {
    cfg.validate();
    if (!(cfg.t > 2.0 && cfg.t < 18.0)) {
        throw Error(ErrorCode::PreconditionKappa, "equidistribution needs 2 < t < 18");
    }
    ExperimentConfig cb = cfg;
    cb.seed = seed_b;
    auto fa = std::async(std::launch::async, [&] { return run_orbit(cfg); });
    const OrbitResult rb = run_orbit(cb);
    const OrbitResult ra = fa.get();
    EquidistReport rep;
    rep.seed_a = cfg.seed;
    rep.seed_b = seed_b;
    rep.a = histogram(ra.records, cfg.t, cfg.bins, cfg.window);
    rep.b = histogram(rb.records, cfg.t, cfg.bins, cfg.window);
    if (rep.a.hits < kMinWindowSamples || rep.b.hits < kMinWindowSamples) {
        throw Error(ErrorCode::InsufficientSamples,
                    "walks visited the window " + std::to_string(rep.a.hits) + " and " +
                        std::to_string(rep.b.hits) + " times");
    }
    rep.distance = total_variation(rep.a, rep.b);
    return rep;
}

// ---------------------------------------------------------------------------
// Discreteness

inline constexpr double kSamePointTolerance = 1e-9;

struct PointCloudStats {
    long distinct = 0;
    /// Smallest sup-norm distance between distinct points; +inf if fewer than two.
    double min_distance = std::numeric_limits<double>::infinity();
};

inline PointCloudStats point_cloud_stats(std::vector<TraceTriple> pts) {
    PointCloudStats out;
    if (pts.empty()) return out;
    const auto key = [](double v) { return std::llround(v / kSamePointTolerance); };
    std::sort(pts.begin(), pts.end(), [&](const TraceTriple& u, const TraceTriple& v) {
        return std::tuple(key(u.x), key(u.y), key(u.z)) < std::tuple(key(v.x), key(v.y), key(v.z));
    });
    std::vector<TraceTriple> uniq{pts.front()};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (distance(pts[i], uniq.back()) > kSamePointTolerance) uniq.push_back(pts[i]);
    }
    std::sort(uniq.begin(), uniq.end(),
              [](const TraceTriple& u, const TraceTriple& v) { return u.x < v.x; });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        for (std::size_t j = i + 1; j < uniq.size() && uniq[j].x - uniq[i].x < best; ++j) {
            const double d = distance(uniq[i], uniq[j]);
            if (d > kSamePointTolerance) best = std::min(best, d);
        }
    }
    out.distinct = static_cast<long>(uniq.size());
    out.min_distance = best;
    return out;
}

enum class DivergenceStart { Fiber, Octant };

struct DivergenceReport {
    TraceTriple start;
    long steps = 0;
    PointCloudStats cloud;
    /// max |coord| along the greedy ascent, one entry per step.
    std::vector<double> escape_profile;
    bool monotone_escape = false;
    /// Slope of log log max|coord| per ascent step (log of the golden ratio,
    /// about 0.481, for Fibonacci-type growth).
    double growth_exponent = 0.0;
    /// log max|coord| per step of an i.i.d. uniform walk from the same start.
    double walk_growth_rate = 0.0;
};

/// A triple in the open negative octant on the level kappa = t (t > 18).
inline TraceTriple octant_start(double t, std::uint64_t seed, long budget) {
    if (!(t > 18.0)) throw Error(ErrorCode::PreconditionKappa, "octant start needs t > 18");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-3.5, -2.05);
    for (long i = 0; i < budget; ++i) {
        const double x = coord(rng), y = coord(rng);
        for (double z : solve_z(x, y, t)) {
            if (z < -2.0) return {x, y, z};
        }
    }
    throw Error(ErrorCode::SearchBudgetExceeded, "no octant triple found on this level");
}

inline constexpr int kMaxAscentSteps = 64;

inline DivergenceReport divergence(const ExperimentConfig& cfg,
                                   DivergenceStart start = DivergenceStart::Fiber) {
    cfg.validate();
    DivergenceReport rep;
    rep.start = start == DivergenceStart::Octant ? octant_start(cfg.t, cfg.seed, cfg.budget)
                                                 : chi(orbit_start(cfg));
    rep.steps = cfg.steps;

    // Orbit point cloud from a trace walk.
    {
        ExperimentConfig c = cfg;
        c.walk = WalkLevel::Trace;
        std::vector<TraceTriple> pts;
        TraceTriple p = rep.start;
        detail::LetterSource letters(c, c.seed ^ 0x9e3779b97f4a7c15ULL);
        pts.push_back(p);
        for (long s = 0; s < c.steps; ++s) {
            p = twist_on_traces(letters.next(s, p), p);
            if (!(p.max_abs() < kEscapeThreshold)) break;
            pts.push_back(p);
        }
        rep.cloud = point_cloud_stats(std::move(pts));
    }

    // Greedy ascent: the inverse of the reducing descent.
    {
        TraceTriple p = rep.start;
        rep.monotone_escape = true;
        double prev = p.max_abs();
        for (int s = 0; s < kMaxAscentSteps; ++s) {
            TraceTriple best = p;
            for (Move m : kWalkLetters) {
                const TraceTriple q = twist_on_traces(m, p);
                if (q.max_abs() > best.max_abs()) best = q;
            }
            p = best;
            const double m = p.max_abs();
            if (!(m < kEscapeThreshold)) break;
            if (!(m > prev)) rep.monotone_escape = false;
            rep.escape_profile.push_back(m);
            prev = m;
        }
        // Least squares on log log m over the steps where it is defined.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t i = 0; i < rep.escape_profile.size(); ++i) {
            const double m = rep.escape_profile[i];
            if (m <= std::exp(1.0)) continue;
            const double x = static_cast<double>(i), y = std::log(std::log(m));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        if (n >= 2) rep.growth_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    // Uniform random walk growth.
    {
        ExperimentConfig c = cfg;
        c.scheme = WalkScheme::Uniform;
        detail::LetterSource letters(c, c.seed ^ 0x5851f42d4c957f2dULL);
        TraceTriple p = rep.start;
        long s = 0;
        double last = p.max_abs();
        for (; s < c.steps; ++s) {
            const TraceTriple q = twist_on_traces(letters.next(s, p), p);
            if (!(q.max_abs() < kEscapeThreshold)) break;
            p = q;
            last = p.max_abs();
        }
        rep.walk_growth_rate = s > 0 ? std::log(std::max(last, 1.0)) / static_cast<double>(s) : 0.0;
    }
    return rep;
}

}  // namespace onehole
