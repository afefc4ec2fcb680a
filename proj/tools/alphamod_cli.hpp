#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <alphamod/alphamod.hpp>

namespace alphamod::cli {

using io::json;
namespace fs = std::filesystem;

enum ExitCode { kPass = 0, kFail = 1, kUsage = 2 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Field {
    std::string key;
    json def;  // default value, also the type template
    std::string help;
};

struct Context {
    fs::path out_dir = "out";
    std::optional<fs::path> output;  // -o, primary artifact
    std::ostream* out = &std::cout;
    std::vector<std::string> artifacts;

    fs::path primary(const std::string& name) const { return output ? *output : out_dir / name; }
    fs::path secondary(const std::string& name) const { return out_dir / name; }

    void write(const fs::path& p, const std::string& text) {
        io::write_text(p, text);
        artifacts.push_back(p.string());
    }
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Field> fields;
    std::function<int(const json&, Context&)> run;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline json parse_number(const std::string& text, bool integer, const std::string& key) {
    std::size_t used = 0;
    try {
        if (integer) {
            long long v = std::stoll(text, &used);
            if (used == text.size()) return v;
        } else {
            double v = std::stod(text, &used);
            if (used == text.size()) return v;
        }
    } catch (const std::exception&) {
    }
    throw UsageError(key + ": expected " + (integer ? "an integer" : "a number") + ", got '" + text + "'");
}

// Checks a config value against the default's type.
inline json coerce(const json& def, const json& v, const std::string& key) {
    if (def.is_null()) {
        if (v.is_null()) return v;
        if (v.is_number() && !v.is_boolean()) return v.get<double>();
        throw UsageError(key + ": expected a number or null");
    }
    if (def.is_boolean()) {
        if (!v.is_boolean()) throw UsageError(key + ": expected true or false");
        return v;
    }
    if (def.is_number_integer()) {
        if (v.is_number_integer()) return v;
        if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>())) return json(v.get<long long>());
        throw UsageError(key + ": expected an integer");
    }
    if (def.is_number()) {
        if (!v.is_number()) throw UsageError(key + ": expected a number");
        return v.get<double>();
    }
    if (def.is_string()) {
        if (v.is_string()) return v;
        if (v.is_number()) return io::fmt(v.get<double>());
        throw UsageError(key + ": expected a string");
    }
    if (def.is_array()) {
        if (!v.is_array()) throw UsageError(key + ": expected a list");
        json out = json::array();
        for (const auto& e : v) out.push_back(def.empty() ? e : coerce(def[0], e, key));
        return out;
    }
    throw UsageError(key + ": unsupported field type");
}

// Flag text to a value shaped like the default. Lists are comma separated,
// nested lists use ':' inside an entry.
inline json from_text(const json& def, const std::string& text, const std::string& key, int depth = 0) {
    if (def.is_null()) return text == "null" ? json() : parse_number(text, false, key);
    if (def.is_boolean()) {
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        throw UsageError(key + ": expected true or false, got '" + text + "'");
    }
    if (def.is_number_integer()) return parse_number(text, true, key);
    if (def.is_number()) return parse_number(text, false, key);
    if (def.is_string()) return text;
    if (def.is_array()) {
        if (def.empty()) throw UsageError(key + ": list has no element type");
        json out = json::array();
        for (const auto& part : split(text, depth == 0 ? ',' : ':')) out.push_back(from_text(def[0], part, key, depth + 1));
        return out;
    }
    throw UsageError(key + ": unsupported field type");
}

inline std::string flag_names(const std::string& key) {
    if (key.size() == 1) return "-" + key + ",--" + key;
    std::string names = "--" + key;
    if (key.find('_') != std::string::npos) {
        std::string alt = key;
        std::replace(alt.begin(), alt.end(), '_', '-');
        names += ",--" + alt;
    }
    return names;
}

inline Exponent exponent(const json& cfg, const std::string& key) {
    try {
        return Exponent::parse(cfg.at(key).get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw UsageError(key + ": " + e.what());
    }
}

inline std::vector<Exponent> exponent_list(const std::string& key, const json& v) {
    std::vector<Exponent> out;
    for (const auto& part : split(v.get<std::string>(), ',')) {
        try {
            out.push_back(Exponent::parse(part));
        } catch (const std::invalid_argument& e) {
            throw UsageError(key + ": " + e.what());
        }
    }
    return out;
}

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
}

inline double alpha_field(const json& cfg, const std::string& key) {
    double a = cfg.at(key).get<double>();
    require(a >= 0.0 && a <= 1.0, key + " must lie in [0,1], got " + io::fmt(a));
    return a;
}

inline int dim_field(const json& cfg) {
    int d = cfg.at("d").get<int>();
    require(d == 1 || d == 2, "d must be 1 or 2");
    return d;
}

inline GridSpec grid_field(const json& cfg, std::size_t n_scale = 1, double L_scale = 1.0) {
    GridSpec g{dim_field(cfg), std::size_t(cfg.at("n").get<long long>()) * n_scale, cfg.at("L").get<double>() * L_scale};
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return g;
}

inline std::uint64_t seed_field(const json& cfg) {
    long long s = cfg.at("seed").get<long long>();
    require(s >= 0, "seed must be nonnegative");
    return std::uint64_t(s);
}

inline std::vector<SpectralSignal> band_signals(const GridSpec& g, std::uint64_t seed, int count, double radius) {
    Rng rng(seed);
    std::vector<SpectralSignal> out;
    for (int i = 0; i < count; ++i) out.push_back(random_bandlimited_spectrum(g, rng.next(), {radius, 0.5, 0.25}));
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// covering

inline int cmd_covering(const json& cfg, Context& ctx) {
    using namespace detail;
    const int d = dim_field(cfg);
    const std::string kind = cfg.at("kind").get<std::string>();
    const double T = cfg.at("trunc").get<double>();
    const double density = cfg.at("density").get<double>();
    const json rj = cfg.at("r");
    require(T > 0, "trunc must be positive");
    require(density > 0, "density must be positive");
    double alpha = alpha_field(cfg, "alpha");

    Covering C;
    if (kind == "dyadic") {
        alpha = 1.0;
        C = build_dyadic_covering(d, T, density);
    } else if (kind == "metric") {
        require(alpha < 1.0, "metric coverings need alpha < 1");
        require(!rj.is_null(), "metric coverings need r");
        C = build_metric_covering(d, alpha, rj.get<double>(), T, density);
    } else if (kind == "ball" || kind == "cube") {
        require(alpha < 1.0, "lattice coverings need alpha < 1, use kind dyadic for alpha = 1");
        Shape shape = kind == "ball" ? Shape::Ball : Shape::Cube;
        if (rj.is_null()) {
            C = alphamod::detail::certified_lattice(d, alpha, std::nullopt, T, shape, density);
        } else {
            require(rj.get<double>() > 0, "r must be positive");
            C = alphamod::detail::lattice_covering(d, alpha, rj.get<double>(), T, shape);
        }
    } else {
        throw UsageError("kind must be ball, cube, dyadic or metric");
    }

    CertificateReport rep = certify_alpha_covering(C, density);
    if (rep.complete) attach_certificate(C, rep);
    const bool passed = rep.passed();
    json doc{{"config", cfg}, {"passed", passed}, {"certificate", io::to_json(rep)}, {"covering", io::to_json(C)}};
    fs::path p = ctx.primary("covering.json");
    ctx.write(p, io::dump(doc));
    *ctx.out << "covering " << kind_name(C.kind) << " d=" << d << " alpha=" << io::fmt(alpha) << ": " << C.size()
             << " patches, n0=" << rep.n0 << ", K=" << io::fmt(rep.K) << ", uncovered=" << rep.uncovered << " -> "
             << (passed ? "PASS" : "FAIL") << " (" << p.string() << ")\n";
    return passed ? kPass : kFail;
}

// ---------------------------------------------------------------------------
// norm

inline int cmd_norm(const json& cfg, Context& ctx) {
    using namespace detail;
    const std::uint64_t seed = seed_field(cfg);
    const std::string kind = cfg.at("signal").get<std::string>();
    const std::string which = cfg.at("norm").get<std::string>();
    const double alpha = alpha_field(cfg, "alpha");
    const double T = cfg.at("trunc").get<double>();
    require(T > 0, "trunc must be positive");
    require(which == "modulation" || which == "besov" || which == "sobolev", "norm must be modulation, besov or sobolev");

    Signal f;
    std::string signal_id;
    if (kind == "file") {
        const std::string path = cfg.at("signal_path").get<std::string>();
        require(!path.empty(), "signal file needs signal_path");
        io::SignalMeta meta;
        f = io::read_signal(path, &meta);
        signal_id = fs::path(path).filename().string();
    } else {
        GridSpec g = grid_field(cfg);
        GaussianParams gp;
        gp.sigma = cfg.at("sigma").get<double>();
        gp.modulation = {cfg.at("modulation").get<double>(), 0.0};
        require(gp.sigma > 0, "sigma must be positive");
        const double radius = cfg.at("radius").get<double>();
        require(radius > 0, "radius must be positive");
        if (kind == "gaussian") {
            f = make_gaussian(g, gp);
        } else if (kind == "random_bandlimited") {
            f = make_test_signal(SignalKind::RandomBandlimited, g, seed, {}, {}, {radius, 0.5, 0.25});
        } else if (kind == "bump_train") {
            BumpTrainParams bp;
            Rng rng(seed);
            for (int b = 0; b < 4; ++b) {
                double rho = 0.5 + 2.0 * rng.uniform();
                bp.centers.push_back({(2 * rng.uniform() - 1) * std::max(0.0, radius - rho), 0.0});
                bp.radii.push_back(rho);
                bp.weights.push_back(0.2 + rng.uniform());
            }
            f = make_test_signal(SignalKind::BumpTrain, g, seed, {}, bp);
        } else {
            throw UsageError("signal must be gaussian, bump_train, random_bandlimited or file");
        }
        signal_id = kind + ":" + std::to_string(seed);
        if (cfg.at("save_signal").get<bool>())
            io::write_signal(ctx.secondary("signal"), f, {kind, seed, "spatial"});
    }
    const SpectralSignal F = fft_forward(f);
    const std::vector<Exponent> ps = exponent_list("p", cfg.at("p"));
    const std::vector<Exponent> qs = exponent_list("q", cfg.at("q"));
    const std::vector<double> ss = cfg.at("s").get<std::vector<double>>();

    std::optional<Bapu> B;
    std::optional<PieceTable> table;
    if (which != "sobolev") {
        try {
            B = which == "besov" ? build_bapu(build_dyadic_covering(f.grid.d, T), f.grid) : scale_bapu(f.grid.d, alpha, T, f.grid);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        table = piece_table(F, *B, ps);
    }

    io::CsvWriter w({"norm", "alpha", "p", "q", "s", "grid", "signal_id", "value", "n_patches", "leaked"});
    const double a_out = which == "besov" ? 1.0 : which == "sobolev" ? 0.0 : alpha;
    for (Exponent p : ps)
        for (Exponent q : qs)
            for (double s : ss) {
                double v;
                if (which == "sobolev") {
                    require(p == Exponent::from_p(2) && q == Exponent::from_p(2), "sobolev norms need p = q = 2");
                    v = sobolev_norm(F, s);
                } else {
                    v = assemble_norm(*table, p, q, s);
                }
                w.row({which, io::fmt(a_out), p.str(), q.str(), io::fmt(s), f.grid.label(), signal_id, io::fmt(v),
                       std::to_string(B ? B->size() : 0), io::fmt(table ? table->leaked : 0.0)});
                *ctx.out << which << " alpha=" << io::fmt(a_out) << " p=" << p.str() << " q=" << q.str()
                         << " s=" << io::fmt(s) << ": " << io::fmt(v) << "\n";
            }

    fs::path path = ctx.primary("norms.csv");
    std::string text = w.str();
    if (fs::exists(path)) {
        std::string old = io::read_text(path);
        std::string header = text.substr(0, text.find('\n') + 1);
        if (old.rfind(header, 0) != 0) throw UsageError(path.string() + " exists with a different header");
        text = old + text.substr(header.size());
    }
    ctx.write(path, text);
    return kPass;
}

// ---------------------------------------------------------------------------
// embed

inline int cmd_embed(const json& cfg, Context& ctx) {
    using namespace detail;
    const std::uint64_t seed = seed_field(cfg);
    const double T = cfg.at("trunc").get<double>();
    const int count = cfg.at("signals").get<int>();
    const double radius = cfg.at("radius").get<double>();
    const double tol = cfg.at("stability").get<double>();
    const bool doubling = cfg.at("doubling").get<bool>();
    require(T > 0 && radius < T, "signal radius must lie below trunc");
    require(count > 0, "signals must be positive");
    std::vector<Exponent> ex;
    for (const auto& e : cfg.at("exponents")) {
        try {
            ex.push_back(Exponent::parse(e.get<std::string>()));
        } catch (const std::invalid_argument& err) {
            throw UsageError(std::string("exponents: ") + err.what());
        }
    }
    require(!ex.empty(), "exponents must not be empty");
    std::vector<std::pair<double, double>> pairs;
    for (const auto& pr : cfg.at("alpha_pairs")) {
        require(pr.size() == 2, "alpha_pairs entries need two values");
        double a1 = pr[0].get<double>(), a2 = pr[1].get<double>();
        require(0 <= a1 && a1 <= a2 && a2 <= 1, "alpha pairs need 0 <= alpha1 <= alpha2 <= 1");
        pairs.emplace_back(a1, a2);
    }
    const std::vector<double> ss = cfg.at("s").get<std::vector<double>>();

    std::vector<GridSpec> grids{grid_field(cfg)};
    if (doubling) grids.push_back(grid_field(cfg, 2, 2.0));
    for (const auto& g : grids)
        require(g.nyquist() > T, "grid " + g.label() + " has Nyquist radius below trunc");

    std::vector<Exponent> ps = ex;
    for (Exponent p : {Exponent::from_p(1), Exponent::from_p(2), Exponent::infinity()})
        if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);

    auto csv = embedding_csv();
    json cases = json::array(), endpoints = json::array();
    bool pass = true;
    double worst_gap = 0;
    for (auto [a1, a2] : pairs) {
        // results[grid][case]
        std::vector<std::vector<EmbeddingResult>> results(grids.size());
        std::vector<std::vector<EndpointRow>> ends(grids.size());
        for (std::size_t gi = 0; gi < grids.size(); ++gi) {
            const GridSpec& g = grids[gi];
            auto signals = embedding_signals(g, seed, count, radius);
            Bapu b1 = scale_bapu(g.d, a1, T, g), b2 = scale_bapu(g.d, a2, T, g);
            EmbeddingData D = embedding_tables(signals, b1, b2, ps);
            for (Exponent p : ex)
                for (Exponent q : ex)
                    for (double s : ss)
                        for (Direction dir : {Direction::Upper, Direction::Lower}) {
                            EmbeddingResult r = evaluate_embedding({g.d, a1, a2, p, q, s, dir}, D);
                            add_row(csv, r, g, T);
                            results[gi].push_back(r);
                        }
            for (double s : ss)
                for (const auto& [pq, shift] : endpoint_shifts(g.d, a1, a2)) {
                    EndpointRow row;
                    row.p = pq.first;
                    row.q = pq.second;
                    row.stated_shift = shift;
                    row.index_shift = weight_shift(g.d, a1, a2, theta2(row.p, row.q));
                    row.consistent = std::abs(row.stated_shift - row.index_shift) <= 1e-15;
                    row.result = evaluate_embedding({g.d, a1, a2, row.p, row.q, s, Direction::Lower}, D);
                    ends[gi].push_back(row);
                }
        }
        for (std::size_t k = 0; k < results[0].size(); ++k) {
            const EmbeddingResult& r = results[0][k];
            bool finite = std::isfinite(r.worst_ratio) && r.worst_ratio > 0 && r.signals_used == count;
            double gap = doubling ? relative_gap(results[1][k].worst_ratio, r.worst_ratio) : 0.0;
            bool ok = finite && gap <= tol;
            worst_gap = std::max(worst_gap, gap);
            pass = pass && ok;
            cases.push_back(json{{"alpha1", a1},
                                 {"alpha2", a2},
                                 {"p", r.c.p.str()},
                                 {"q", r.c.q.str()},
                                 {"s", r.c.s},
                                 {"direction", direction_name(r.c.direction)},
                                 {"shift", r.shift},
                                 {"worst_ratio", io::num(r.worst_ratio)},
                                 {"grid_gap", gap},
                                 {"pass", ok}});
        }
        for (std::size_t k = 0; k < ends[0].size(); ++k) {
            const EndpointRow& e = ends[0][k];
            bool finite = std::isfinite(e.result.worst_ratio) && e.result.worst_ratio > 0;
            double gap = doubling ? relative_gap(ends[1][k].result.worst_ratio, e.result.worst_ratio) : 0.0;
            bool ok = finite && gap <= tol;
            pass = pass && ok;
            endpoints.push_back(json{{"alpha1", a1},
                                     {"alpha2", a2},
                                     {"p", e.p.str()},
                                     {"q", e.q.str()},
                                     {"s", e.result.c.s},
                                     {"stated_shift", e.stated_shift},
                                     {"index_shift", e.index_shift},
                                     {"consistent", e.consistent},
                                     {"worst_ratio", io::num(e.result.worst_ratio)},
                                     {"grid_gap", gap},
                                     {"pass", ok}});
        }
    }
    json summary{{"config", cfg}, {"pass", pass}, {"worst_grid_gap", worst_gap}, {"cases", cases}, {"endpoints", endpoints}};
    ctx.write(ctx.primary("embed.json"), io::dump(summary));
    ctx.write(ctx.secondary("embed.csv"), csv.str());
    *ctx.out << "embed: " << cases.size() << " cases, " << endpoints.size() << " endpoint checks, worst grid gap "
             << io::fmt(worst_gap) << " -> " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kPass : kFail;
}

// ---------------------------------------------------------------------------
// sharpness

inline int cmd_sharpness(const json& cfg, Context& ctx) {
    using namespace detail;
    SharpnessConfig c;
    c.d = dim_field(cfg);
    c.alpha1 = alpha_field(cfg, "alpha1");
    c.alpha2 = alpha_field(cfg, "alpha2");
    c.p = exponent(cfg, "p");
    c.q = exponent(cfg, "q");
    c.s = cfg.at("s").get<double>();
    c.eps = cfg.at("eps").get<double>();
    const std::string mode = cfg.at("mode").get<std::string>();
    if (mode == "scaled")
        c.mode = BumpMode::Scaled;
    else if (mode == "fixed")
        c.mode = BumpMode::Fixed;
    else
        require(mode == "auto", "mode must be auto, scaled or fixed");
    c.rp = cfg.at("rp").get<double>();
    c.first_center = cfg.at("first_center").get<double>();
    c.fixed_radius = cfg.at("fixed_radius").get<double>();
    c.N_list = cfg.at("N_list").get<std::vector<int>>();
    long long n = cfg.at("n").get<long long>();
    require(n >= 16 && (n & (n - 1)) == 0, "n must be a power of two");
    c.n = std::size_t(n);
    c.nyquist_margin = cfg.at("nyquist_margin").get<double>();
    c.max_center = cfg.at("max_center").get<double>();
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    SharpnessSetup S = sharpness_setup(c);
    GrowthSummary G = sharpness_experiment(S);
    auto csv = growth_csv();
    add_rows(csv, c, G);
    const bool pass = G.pass_above && G.pass_at;
    json centers = json::array();
    for (double x : S.centers) centers.push_back(x);
    json doc{{"config", cfg},
             {"pass", pass},
             {"summary", to_json(G)},
             {"grid", io::to_json(S.grid)},
             {"trunc_radius", S.trunc_radius},
             {"centers", centers}};
    ctx.write(ctx.primary("sharpness.json"), io::dump(doc));
    ctx.write(ctx.secondary("growth.csv"), csv.str());
    *ctx.out << "sharpness p=" << c.p.str() << " q=" << c.q.str() << " (" << bump_mode_name(G.mode)
             << "): threshold " << io::fmt(G.threshold) << ", growth above " << io::fmt(G.growth_above)
             << ", band at threshold " << io::fmt(G.band_at) << " -> " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kPass : kFail;
}

// ---------------------------------------------------------------------------
// frame

inline int cmd_frame(const json& cfg, Context& ctx) {
    using namespace detail;
    const std::uint64_t seed = seed_field(cfg);
    const double alpha = alpha_field(cfg, "alpha");
    require(alpha < 1.0, "brushlet frames need alpha < 1");
    const double T = cfg.at("trunc").get<double>();
    const int count = cfg.at("signals").get<int>();
    const double radius = cfg.at("radius").get<double>();
    require(count > 0, "signals must be positive");
    require(T > 0 && radius < T, "signal radius must lie below trunc");
    SpaceParams sp{alpha, exponent(cfg, "p"), exponent(cfg, "q"), cfg.at("s").get<double>()};
    FrameOptions fo;
    fo.bell_delta = cfg.at("bell_delta").get<double>();
    require(fo.bell_delta > 0 && fo.bell_delta < 0.5, "bell_delta must lie in (0, 1/2)");
    AnalyzeOptions ao;
    ao.tail_energy = cfg.at("tail_energy").get<double>();
    require(ao.tail_energy >= 0, "tail_energy must be nonnegative");
    const double tol = cfg.at("roundtrip_tol").get<double>();
    const double stability = cfg.at("stability").get<double>();
    const bool doubling = cfg.at("doubling").get<bool>();

    std::vector<GridSpec> grids{grid_field(cfg)};
    if (doubling) grids.push_back(grid_field(cfg, 2, 2.0));

    json per_grid = json::array();
    std::vector<EquivalenceReport> reports;
    bool pass = true;
    std::optional<GramReport> gram;
    std::optional<BoundednessReport> bound;
    std::string coeff_csv;
    for (std::size_t gi = 0; gi < grids.size(); ++gi) {
        BrushletFrame F;
        try {
            F = build_brushlet_frame(grids[gi].d, alpha, T, grids[gi], fo);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        auto signals = band_signals(F.grid, seed, count, radius);
        EquivalenceReport R = frame_norm_equivalence(signals, F, sp, ao);
        pass = pass && R.roundtrip_max <= tol;
        per_grid.push_back(json{{"grid", io::to_json(F.grid)},
                                {"cells", F.size()},
                                {"roundtrip_max", R.roundtrip_max},
                                {"ratio_min", io::num(R.ratio_min)},
                                {"ratio_max", io::num(R.ratio_max)},
                                {"coefficients_max", R.coefficients_max}});
        if (gi == 0) {
            gram = gram_report(F, cfg.at("gram_nmax").get<int>());
            bound = synthesis_boundedness(F, sp, seed);
            std::ostringstream os;
            write_coefficients_csv(os, analyze(signals.front(), F, ao));
            coeff_csv = os.str();
        }
        reports.push_back(std::move(R));
    }
    double disagreement = doubling ? interval_disagreement(reports[0], reports[1]) : 0.0;
    pass = pass && disagreement <= stability;
    json doc{{"config", cfg},
             {"pass", pass},
             {"grids", per_grid},
             {"interval_disagreement", disagreement},
             {"gram", {{"nmax", gram->nmax},
                       {"diag_min", gram->diag_min},
                       {"diag_max", gram->diag_max},
                       {"offdiag_max", gram->offdiag_max},
                       {"delta", gram->delta}}},
             {"synthesis_bound", {{"trials", bound->trials},
                                  {"ratio_min", io::num(bound->ratio_min)},
                                  {"ratio_max", io::num(bound->ratio_max)}}}};
    ctx.write(ctx.primary("frame.json"), io::dump(doc));
    ctx.write(ctx.secondary("frame_coefficients.csv"), coeff_csv);
    *ctx.out << "frame alpha=" << io::fmt(alpha) << ": roundtrip " << io::fmt(reports[0].roundtrip_max)
             << ", ratios [" << io::fmt(reports[0].ratio_min) << ", " << io::fmt(reports[0].ratio_max)
             << "], grid disagreement " << io::fmt(disagreement) << ", Gram delta " << io::fmt(gram->delta)
             << " -> " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kPass : kFail;
}

// ---------------------------------------------------------------------------

inline std::vector<Command> commands() {
    const json exps = json::array({"1", "4/3", "2", "4", "inf"});
    return {
        {"covering",
         "build and certify a frequency covering",
         {{"d", 1, "dimension"},
          {"alpha", 0.5, "scale parameter in [0,1]"},
          {"kind", "ball", "ball, cube, dyadic or metric"},
          {"r", nullptr, "covering radius parameter (certified default when null)"},
          {"trunc", 100.0, "truncation radius"},
          {"density", 4.0, "certificate sample density"}},
         cmd_covering},
        {"norm",
         "compute alpha-modulation, Besov or Sobolev norms of a signal",
         {{"d", 1, "dimension"},
          {"n", 4096, "grid points per axis"},
          {"L", 32.0, "half-width of the spatial box"},
          {"signal", "gaussian", "gaussian, bump_train, random_bandlimited or file"},
          {"signal_path", "", "base path of a stored signal (.bin/.json)"},
          {"sigma", 1.0, "Gaussian width"},
          {"modulation", 0.0, "Gaussian spectral center along the first axis"},
          {"radius", 16.0, "spectral radius of generated signals"},
          {"norm", "modulation", "modulation, besov or sobolev"},
          {"alpha", 0.0, "scale parameter"},
          {"p", "2", "integrability exponents, comma separated"},
          {"q", "2", "summability exponents, comma separated"},
          {"s", json::array({0.0}), "smoothness values"},
          {"trunc", 64.0, "truncation radius of the partition"},
          {"save_signal", false, "store the generated signal next to the table"}},
         cmd_norm},
        {"embed",
         "check embeddings between alpha-modulation spaces",
         {{"d", 1, "dimension"},
          {"n", 4096, "grid points per axis"},
          {"L", 32.0, "half-width of the spatial box"},
          {"trunc", 64.0, "truncation radius"},
          {"signals", 9, "number of test signals"},
          {"radius", 48.0, "spectral radius of the test signals"},
          {"alpha_pairs", json::array({json::array({0.0, 0.5}), json::array({0.0, 1.0}), json::array({0.5, 1.0})}),
           "alpha1:alpha2 pairs"},
          {"exponents", exps, "exponents used for p and q"},
          {"s", json::array({0.0, 1.0}), "smoothness values"},
          {"doubling", true, "repeat on the doubled grid and compare"},
          {"stability", 0.1, "allowed relative change under grid doubling"}},
         cmd_embed},
        {"sharpness",
         "growth of extremal families above and at the embedding threshold",
         {{"d", 1, "dimension (1 only)"},
          {"alpha1", 0.0, "smaller scale parameter"},
          {"alpha2", 1.0, "larger scale parameter"},
          {"p", "2", "integrability exponent"},
          {"q", "2", "summability exponent"},
          {"s", 0.0, "smoothness on the alpha1 side"},
          {"eps", 0.25, "offset above the threshold"},
          {"mode", "auto", "auto, scaled or fixed"},
          {"rp", 0.1, "plateau parameter"},
          {"first_center", 40.0, "first bump center"},
          {"fixed_radius", 1.0, "bump radius for fixed families"},
          {"N_list", json::array({4, 8, 16, 32, 64}), "family sizes"},
          {"n", 1 << 19, "grid points"},
          {"nyquist_margin", 1.1, "Nyquist radius over truncation radius"},
          {"max_center", 1e6, "largest admissible center"}},
         cmd_sharpness},
        {"frame",
         "brushlet frame roundtrip, norm equivalence and Gram report",
         {{"d", 1, "dimension"},
          {"alpha", 0.5, "scale parameter in [0,1)"},
          {"n", 4096, "grid points per axis"},
          {"L", 32.0, "half-width of the spatial box"},
          {"trunc", 64.0, "truncation radius"},
          {"signals", 20, "number of test signals"},
          {"radius", 60.0, "spectral radius of the test signals"},
          {"p", "2", "integrability exponent"},
          {"q", "2", "summability exponent"},
          {"s", 0.0, "smoothness"},
          {"bell_delta", 0.125, "bell transition width"},
          {"tail_energy", 1e-14, "coefficient truncation energy per cell, relative"},
          {"roundtrip_tol", 1e-6, "roundtrip bar"},
          {"doubling", true, "repeat on the doubled grid and compare"},
          {"stability", 0.1, "allowed change of the ratio interval under doubling"},
          {"gram_nmax", 64, "Gram block size per axis"}},
         cmd_frame},
    };
}

// Defaults, then the config file, then explicit flags.
inline json resolve_config(const Command& cmd, const std::string& config_path,
                           const std::vector<std::pair<std::string, std::string>>& flags) {
    json cfg = json::object();
    for (const auto& f : cmd.fields) cfg[f.key] = f.def;
    cfg["seed"] = 0;
    auto field_def = [&](const std::string& key) -> const json* {
        if (key == "seed") return &cfg["seed"];
        for (const auto& f : cmd.fields)
            if (f.key == key) return &f.def;
        return nullptr;
    };
    if (!config_path.empty()) {
        json file;
        try {
            file = json::parse(io::read_text(config_path));
        } catch (const json::parse_error& e) {
            throw UsageError("config " + config_path + " is not valid JSON: " + e.what());
        } catch (const std::runtime_error& e) {
            throw UsageError(e.what());
        }
        if (!file.is_object()) throw UsageError("config must be a JSON object");
        for (const auto& [key, v] : file.items()) {
            if (key == "command") {
                if (v != cmd.name) throw UsageError("config is for command " + v.dump() + ", not " + cmd.name);
                continue;
            }
            const json* def = field_def(key);
            if (!def) throw UsageError("unknown config field '" + key + "' for " + cmd.name);
            cfg[key] = detail::coerce(*def, v, key);
        }
    }
    for (const auto& [key, text] : flags) cfg[key] = detail::from_text(*field_def(key), text, key);
    return cfg;
}

inline void append_run_log(const fs::path& dir, const std::string& line) {
    fs::create_directories(dir);
    std::ofstream os(dir / "run.log", std::ios::app);
    os << line << "\n";
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"alpha-modulation space toolkit", "alphamod"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "print help for every command");

    const std::vector<Command> cmds = commands();
    struct Bound {
        std::string config, out = "out", output;
        std::string seed;
        std::vector<std::string> values;
        std::vector<CLI::Option*> opts;
        CLI::Option* seed_opt = nullptr;
        CLI::Option* output_opt = nullptr;
        CLI::App* sub = nullptr;
    };
    std::vector<Bound> bound(cmds.size());
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        Bound& b = bound[i];
        b.sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        b.sub->add_option("--config", b.config, "JSON config file");
        b.seed_opt = b.sub->add_option("--seed", b.seed, "random seed");
        b.sub->add_option("--out", b.out, "output directory")->capture_default_str();
        b.output_opt = b.sub->add_option("-o,--output", b.output, "path of the main artifact");
        b.values.resize(cmds[i].fields.size());
        for (std::size_t k = 0; k < cmds[i].fields.size(); ++k) {
            const Field& f = cmds[i].fields[k];
            b.opts.push_back(b.sub->add_option(detail::flag_names(f.key), b.values[k], f.help + " [" + f.def.dump() + "]"));
        }
    }

    std::vector<const char*> argv{"alphamod"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kPass;
        }
        err << "alphamod: " << e.what() << "\n";
        return kUsage;
    }

    for (std::size_t i = 0; i < cmds.size(); ++i) {
        Bound& b = bound[i];
        if (!b.sub->parsed()) continue;
        const auto start = std::chrono::steady_clock::now();
        Context ctx;
        ctx.out = &out;
        ctx.out_dir = b.out;
        if (b.output_opt->count()) ctx.output = fs::path(b.output);
        int code;
        try {
            std::vector<std::pair<std::string, std::string>> flags;
            for (std::size_t k = 0; k < b.opts.size(); ++k)
                if (b.opts[k]->count()) flags.emplace_back(cmds[i].fields[k].key, b.values[k]);
            if (b.seed_opt->count()) flags.emplace_back("seed", b.seed);
            json cfg = resolve_config(cmds[i], b.config, flags);
            code = cmds[i].run(cfg, ctx);
        } catch (const UsageError& e) {
            err << "alphamod " << cmds[i].name << ": " << e.what() << "\n";
            return kUsage;
        } catch (const json::exception& e) {
            err << "alphamod " << cmds[i].name << ": bad config value: " << e.what() << "\n";
            return kUsage;
        } catch (const std::invalid_argument& e) {
            err << "alphamod " << cmds[i].name << ": " << e.what() << "\n";
            return kUsage;
        } catch (const std::exception& e) {
            err << "alphamod " << cmds[i].name << ": " << e.what() << "\n";
            code = kFail;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::localtime(&now));
        std::string line = std::string(stamp) + " " + cmds[i].name + " exit=" + std::to_string(code) +
                           " seconds=" + io::fmt(secs) + " threads=" + std::to_string(thread_count());
        for (const auto& a : ctx.artifacts) line += " " + a;
        append_run_log(ctx.out_dir, line);
        return code;
    }
    return kUsage;
}

}  // namespace alphamod::cli
