#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "onehole/onehole.hpp"

using json = nlohmann::json;
using namespace onehole;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 1;
constexpr int kExitBudget = 2;
constexpr int kExitVerify = 3;

constexpr const char* kCsvHeader = "step,letter,x,y,z,kappa,level";

struct Options {
    double t = 10.0;
    std::optional<int> level;
    long steps = 1000;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> seed2;
    int bins = 8;
    double window = 2.0;
    std::string format = "csv";
    std::string out;
    long budget = 100000;

    std::string scheme = "confined";
    std::string word;
    double bound = 20.0;
    bool matrix = false;
    std::string start = "fiber";
    int count = 1;
    std::vector<double> triple;
    std::vector<double> g, h;
    bool twists_only = false;
    std::string suite = "all";
    double scale = 1.0;
    bool flip_dp = false;
};

std::string num(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

json to_json(const TraceTriple& p) { return json::array({p.x, p.y, p.z}); }
json to_json(const GroupElem& g) { return json::array({g.a, g.b, g.c, g.d}); }

std::vector<Move> parse_word(const std::string& s) {
    std::vector<Move> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        const auto m = parse_move(tok);
        if (!m) throw Error(ErrorCode::InvalidArgument, "unknown letter '" + tok + "'");
        out.push_back(*m);
    }
    return out;
}

std::string word_string(const std::vector<Move>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ',';
        s += to_string(w[i]);
    }
    return s;
}

GroupElem parse_matrix(const std::vector<double>& v, const char* name) {
    if (v.size() != 4) {
        throw Error(ErrorCode::InvalidArgument, std::string(name) + " needs four entries a,b,c,d");
    }
    return GroupElem::checked(v[0], v[1], v[2], v[3], 1e-6).normalized();
}

TraceTriple parse_triple(const std::vector<double>& v) {
    if (v.size() != 3) throw Error(ErrorCode::InvalidArgument, "--triple needs x,y,z");
    return {v[0], v[1], v[2]};
}

ExperimentConfig experiment_config(const Options& o) {
    ExperimentConfig c;
    c.t = o.t;
    c.level = o.level;
    c.steps = o.steps;
    const auto s = parse_scheme(o.scheme);
    if (!s) throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + o.scheme + "'");
    c.scheme = *s;
    c.word = parse_word(o.word);
    c.bound = o.bound;
    c.walk = o.matrix ? WalkLevel::Matrix : WalkLevel::Trace;
    c.seed = o.seed;
    c.bins = o.bins;
    c.window = o.window;
    c.budget = o.budget;
    c.validate();
    return c;
}

json config_json(const std::string& cmd, const Options& o) {
    json c{{"command", cmd},   {"t", o.t},           {"steps", o.steps},
           {"seed", o.seed},   {"bins", o.bins},     {"window", o.window},
           {"format", o.format}, {"budget", o.budget}, {"scheme", o.scheme},
           {"word", o.word},   {"bound", o.bound},   {"walk", o.matrix ? "matrix" : "trace"},
           {"start", o.start}, {"count", o.count},   {"twists_only", o.twists_only},
           {"suite", o.suite}, {"scale", o.scale}, {"flip_dp", o.flip_dp}};
    c["level"] = o.level ? json(*o.level) : json(nullptr);
    c["seed2"] = o.seed2 ? *o.seed2 : o.seed + 1;
    if (!o.triple.empty()) c["triple"] = o.triple;
    if (!o.g.empty()) c["g"] = o.g;
    if (!o.h.empty()) c["h"] = o.h;
    return c;
}

// CSV for the record-stream commands.
void write_records(std::ostream& os, const std::vector<OrbitRecord>& recs) {
    os << kCsvHeader << '\n';
    for (const OrbitRecord& r : recs) {
        os << r.step << ',' << (r.letter ? std::string(to_string(*r.letter)) : std::string())
           << ',' << num(r.triple.x) << ',' << num(r.triple.y) << ',' << num(r.triple.z) << ','
           << num(r.kappa) << ',' << r.level << '\n';
    }
}

json records_json(const std::vector<OrbitRecord>& recs) {
    json arr = json::array();
    for (const OrbitRecord& r : recs) {
        arr.push_back({{"step", r.step},
                       {"letter", r.letter ? json(std::string(to_string(*r.letter))) : json(nullptr)},
                       {"x", r.triple.x},
                       {"y", r.triple.y},
                       {"z", r.triple.z},
                       {"kappa", r.kappa},
                       {"level", r.level}});
    }
    return arr;
}

// Flattened key,value CSV for the report commands.
void flatten(const json& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            flatten(j[i], prefix + "." + std::to_string(i), os);
        }
    } else if (j.is_number_float()) {
        os << prefix << ',' << num(j.get<double>()) << '\n';
    } else if (j.is_string()) {
        os << prefix << ',' << j.get<std::string>() << '\n';
    } else {
        os << prefix << ',' << j.dump() << '\n';
    }
}

class Output {
public:
    explicit Output(const Options& o) : format_(o.format) {
        if (!o.out.empty()) {
            file_.open(o.out, std::ios::binary);
            if (!file_) throw Error(ErrorCode::InvalidArgument, "cannot open " + o.out);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    bool json_format() const { return format_ == "json"; }

    void report(const json& config, const json& results) {
        if (json_format()) {
            stream() << json{{"config", config}, {"results", results}}.dump(2) << '\n';
        } else {
            stream() << "key,value\n";
            flatten(results, "", stream());
        }
    }

private:
    std::string format_;
    std::ofstream file_;
};

json classify_results(double t) {
    const Regime r = trichotomy(t);
    return {{"t", t},
            {"regime", std::string(to_string(r))},
            {"boundary", std::abs(t - 2.0) <= kRegimeBand || std::abs(t - 18.0) <= kRegimeBand}};
}

int cmd_classify(const Options& o) {
    Output out(o);
    out.report(config_json("classify", o), classify_results(o.t));
    return kExitOk;
}

json transcript_json(const FullReduction& fr) {
    json arr = json::array();
    for (const TranscriptEntry& e : fr.transcript) {
        json j{{"after", to_json(e.after)}};
        if (e.kind == TranscriptEntry::Kind::Twist) {
            j["move"] = std::string(to_string(e.move));
        } else {
            j["power"] = e.power;
        }
        arr.push_back(j);
    }
    return arr;
}

int cmd_reduce(const Options& o) {
    Output out(o);
    json res;
    if (!o.g.empty() || !o.h.empty()) {
        const PairState s{parse_matrix(o.g, "--g"), parse_matrix(o.h, "--h")};
        const FullReduction fr = full_reduction(s, o.budget);
        res = {{"start", to_json(chi(s))},
               {"terminal", to_json(chi(fr.state))},
               {"g", to_json(fr.state.g)},
               {"h", to_json(fr.state.h)},
               {"g_class", std::string(to_string(classify(fr.state.g)))},
               {"h_class", std::string(to_string(classify(fr.state.h)))},
               {"transcript", transcript_json(fr)}};
    } else {
        const TraceTriple p = parse_triple(o.triple);
        const ReductionMode mode = o.twists_only ? ReductionMode::TwistsOnly : ReductionMode::Full;
        const ReductionResult r =
            reduce_to_region(p, mode, static_cast<int>(std::min<long>(o.budget, 1L << 30)));
        res = {{"start", to_json(p)},
               {"kappa", kappa(p)},
               {"terminal", to_json(r.q)},
               {"region", r.region == Region::EllipticSlab ? "EllipticSlab" : "NegativeOctant"},
               {"iterations", r.iterations},
               {"word", word_string(r.word)},
               {"needs_sigma1", r.needs_sigma1},
               {"needs_sigma2", r.needs_sigma2}};
    }
    out.report(config_json("reduce", o), res);
    return kExitOk;
}

int cmd_orbit(const Options& o) {
    const ExperimentConfig cfg = experiment_config(o);
    const OrbitResult r = run_orbit(cfg);
    Output out(o);
    if (out.json_format()) {
        json res{{"start_g", to_json(r.start.g)},
                 {"start_h", to_json(r.start.h)},
                 {"level", r.level},
                 {"max_relative_drift", r.max_relative_drift},
                 {"level_constant", r.level_constant},
                 {"escaped_at", r.escaped_at ? json(*r.escaped_at) : json(nullptr)},
                 {"records", records_json(r.records)}};
        out.report(config_json("orbit", o), res);
    } else {
        write_records(out.stream(), r.records);
    }
    return kExitOk;
}

json histogram_json(const Histogram& h) {
    return {{"bins", h.bins}, {"window", h.window}, {"hits", h.hits}, {"counts", h.counts}};
}

int cmd_equidist(const Options& o) {
    const ExperimentConfig cfg = experiment_config(o);
    const EquidistReport rep = equidistribution(cfg, o.seed2 ? *o.seed2 : o.seed + 1);
    Output out(o);
    out.report(config_json("equidist", o), {{"seed_a", rep.seed_a},
                                            {"seed_b", rep.seed_b},
                                            {"distance", rep.distance},
                                            {"a", histogram_json(rep.a)},
                                            {"b", histogram_json(rep.b)}});
    return kExitOk;
}

int cmd_diverge(const Options& o) {
    const ExperimentConfig cfg = experiment_config(o);
    DivergenceStart start;
    if (o.start == "fiber") {
        start = DivergenceStart::Fiber;
    } else if (o.start == "octant") {
        start = DivergenceStart::Octant;
    } else {
        throw Error(ErrorCode::InvalidArgument, "--start is fiber or octant");
    }
    const DivergenceReport rep = divergence(cfg, start);
    Output out(o);
    out.report(config_json("diverge", o),
               {{"start", to_json(rep.start)},
                {"regime", std::string(to_string(trichotomy(o.t)))},
                {"steps", rep.steps},
                {"distinct_points", rep.cloud.distinct},
                {"min_distance", rep.cloud.min_distance},
                {"escape_profile", rep.escape_profile},
                {"monotone_escape", rep.monotone_escape},
                {"growth_exponent", rep.growth_exponent},
                {"walk_growth_rate", rep.walk_growth_rate}});
    return kExitOk;
}

int cmd_sample(const Options& o) {
    FiberSpec spec;
    spec.t = o.t;
    spec.level = o.level;
    spec.count = o.count;
    spec.seed = o.seed;
    spec.budget = o.budget;
    const std::vector<FiberSample> samples = sample_fiber(spec);
    Output out(o);
    if (out.json_format()) {
        json arr = json::array();
        for (const FiberSample& s : samples) {
            arr.push_back({{"g", to_json(s.pair.g)},
                           {"h", to_json(s.pair.h)},
                           {"triple", to_json(chi(s.pair))},
                           {"t", s.fiber.t},
                           {"level", s.fiber.level}});
        }
        out.report(config_json("sample", o), {{"samples", arr}});
    } else {
        std::vector<OrbitRecord> recs;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const TraceTriple p = chi(samples[i].pair);
            recs.push_back({static_cast<long>(i), std::nullopt, p, kappa(p), samples[i].fiber.level});
        }
        write_records(out.stream(), recs);
    }
    return kExitOk;
}

int cmd_lift(const Options& o) {
    const GroupElem g = parse_matrix(o.g, "--g");
    json res{{"g", to_json(g)},
             {"class", std::string(to_string(classify(g)))},
             {"canonical_w", canonical_lift(g).w}};
    if (std::abs(g.trace()) >= kAmbiguousTrace) res["reference_w"] = reference_lift(g);
    if (!o.h.empty()) {
        const GroupElem h = parse_matrix(o.h, "--h");
        const LiftedElem c = lifted_commutator(g, h);
        const FiberClass fc = fiber_class(c);
        res["h"] = to_json(h);
        res["commutator"] = to_json(c.g);
        res["commutator_w"] = c.w;
        res["t"] = fc.t;
        res["level"] = fc.level;
    }
    Output out(o);
    out.report(config_json("lift", o), res);
    return kExitOk;
}

int cmd_verify(const Options& o) {
    VerifyOptions vo;
    vo.seed = o.seed;
    vo.scale = o.scale;
    if (o.flip_dp) {
        vo.dp = [](const GroupElem& g, const GroupElem& h) {
            DpMatrix m = dp_map(g, h);
            m.rightCols<3>() *= -1.0;
            return m;
        };
    }
    const std::vector<LedgerEntry> ledger = run_verify(o.suite, vo);
    Output out(o);
    if (out.json_format()) {
        json arr = json::array();
        for (const LedgerEntry& e : ledger) {
            arr.push_back({{"suite", e.suite},
                           {"check", e.check},
                           {"passed", e.passed},
                           {"samples", e.samples},
                           {"worst", e.worst},
                           {"tolerance", e.tolerance},
                           {"note", e.note}});
        }
        out.report(config_json("verify", o), {{"passed", all_passed(ledger)}, {"ledger", arr}});
    } else {
        std::ostream& os = out.stream();
        os << "suite,check,passed,samples,worst,tolerance\n";
        for (const LedgerEntry& e : ledger) {
            os << e.suite << ',' << e.check << ',' << (e.passed ? "true" : "false") << ','
               << e.samples << ',' << num(e.worst) << ',' << num(e.tolerance) << '\n';
        }
    }
    return all_passed(ledger) ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twist dynamics on one-holed torus character varieties"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    Options o;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--t", o.t, "Boundary trace / kappa level");
        sub->add_option("--level", o.level, "Component level of the lifted commutator");
        sub->add_option("--steps", o.steps, "Walk length");
        sub->add_option("--seed", o.seed, "RNG seed");
        sub->add_option("--bins", o.bins, "Histogram bins per axis");
        sub->add_option("--window", o.window, "Histogram half-width");
        sub->add_option("--format", o.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", o.out, "Output path (default stdout)");
        sub->add_option("--budget", o.budget, "Search / rejection budget");
    };
    const auto walk = [&](CLI::App* sub) {
        sub->add_option("--scheme", o.scheme, "confined, uniform or fixed")
            ->check(CLI::IsMember({"confined", "uniform", "fixed"}));
        sub->add_option("--word", o.word, "Letters for the fixed scheme, e.g. T1,T2i");
        sub->add_option("--bound", o.bound, "Coordinate bound for the confined scheme");
        sub->add_flag("--matrix", o.matrix, "Walk on matrix pairs instead of traces");
    };

    auto* classify_cmd = app.add_subcommand("classify", "Regime of the fiber at trace t");
    common(classify_cmd);

    auto* reduce_cmd = app.add_subcommand("reduce", "Reduce a triple, or a pair with --g/--h");
    common(reduce_cmd);
    reduce_cmd->add_option("--triple", o.triple, "x,y,z")->delimiter(',')->expected(3);
    reduce_cmd->add_option("--g", o.g, "a,b,c,d")->delimiter(',')->expected(4);
    reduce_cmd->add_option("--h", o.h, "a,b,c,d")->delimiter(',')->expected(4);
    reduce_cmd->add_flag("--twists-only", o.twists_only, "Use only T1, T2 and inverses");

    auto* orbit_cmd = app.add_subcommand("orbit", "Random or fixed-word twist walk");
    common(orbit_cmd);
    walk(orbit_cmd);

    auto* equidist_cmd = app.add_subcommand("equidist", "Histogram distance of two walks");
    common(equidist_cmd);
    walk(equidist_cmd);
    equidist_cmd->add_option("--seed2", o.seed2, "Seed of the second walk (default seed+1)");

    auto* diverge_cmd = app.add_subcommand("diverge", "Discreteness diagnostics");
    common(diverge_cmd);
    walk(diverge_cmd);
    diverge_cmd->add_option("--start", o.start, "fiber or octant")
        ->check(CLI::IsMember({"fiber", "octant"}));

    auto* sample_cmd = app.add_subcommand("sample", "Sample pairs on a fiber");
    common(sample_cmd);
    sample_cmd->add_option("--count", o.count, "Number of samples");

    auto* lift_cmd = app.add_subcommand("lift", "Lifts to the universal cover");
    common(lift_cmd);
    lift_cmd->add_option("--g", o.g, "a,b,c,d")->delimiter(',')->expected(4)->required();
    lift_cmd->add_option("--h", o.h, "a,b,c,d")->delimiter(',')->expected(4);

    auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suites");
    common(verify_cmd);
    verify_cmd->add_option("--suite", o.suite, "Suite name or all");
    verify_cmd->add_option("--scale", o.scale, "Sample count multiplier");
    verify_cmd->add_flag("--flip-dp", o.flip_dp, "Negative control: negate the eta block of dp");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitPrecondition;
    }

    try {
        if (*classify_cmd) return cmd_classify(o);
        if (*reduce_cmd) return cmd_reduce(o);
        if (*orbit_cmd) return cmd_orbit(o);
        if (*equidist_cmd) return cmd_equidist(o);
        if (*diverge_cmd) return cmd_diverge(o);
        if (*sample_cmd) return cmd_sample(o);
        if (*lift_cmd) return cmd_lift(o);
        if (*verify_cmd) return cmd_verify(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.category() == ErrorCategory::Budget ? kExitBudget : kExitPrecondition;
    }
    return kExitPrecondition;
}
