// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run all criteria
//   acceptance --criterion N   run criterion N only

#include <alphamod/alphamod.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

using namespace alphamod;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kSumToOne = 1e-8;
constexpr double kSquareSumFactor = 0.99;
constexpr double kSlope = 0.05;
constexpr double kWindow = 10.0;
constexpr double kGridStability = 0.10;
constexpr double kCountingStability = 0.10;
constexpr double kRoundtrip = 1e-6;
constexpr double kGrowth = 2.0;
constexpr double kBand = 2.0;
constexpr double kSameK = 1e-12;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [fail: " << what << "]";
        }
    }
};

Exponent P(int p) { return Exponent::from_p(p); }
const Exponent kInf = Exponent::infinity();

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// 1. Index algebra on the 13 x 13 exponent grid.
void c1(Outcome& o) {
    auto grid = exponent_test_grid();
    int pairs = 0;
    for (Exponent p : grid)
        for (Exponent q : grid) {
            Exponent pc = p.conjugate(), qc = q.conjugate();
            const std::string at = "p=" + p.str() + " q=" + q.str();
            o.check(theta2(p, q) == -theta1(pc, qc), "theta duality at " + at);
            o.check(nu2(p, q) == -nu1(pc, qc), "nu duality at " + at);
            o.check(theta1(p, q) <= nu1(p, q), "theta1 <= nu1 at " + at);
            o.check(theta2(p, q) >= nu2(p, q), "theta2 >= nu2 at " + at);
            ++pairs;
        }
    o.check(pairs == 169, "grid size");
    o.detail << pairs << " exponent pairs, exact rational arithmetic";
}

// 2. Lattice-ball coverings: certified at T = 50 and T = 100 with the same n0 and K.
void c2(Outcome& o) {
    int cases = 0;
    for (int d : {1, 2})
        for (double alpha : {0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0}) {
            Covering a = build_ball_covering(d, alpha, std::nullopt, 50.0);
            Covering b = build_ball_covering(d, alpha, a.r, 100.0);
            auto ra = certify_alpha_covering(a), rb = certify_alpha_covering(b);
            const std::string at = "d=" + std::to_string(d) + " alpha=" + fmt(alpha);
            o.check(ra.passed() && rb.passed(), "certificate at " + at);
            o.check(ra.n0 == rb.n0, "n0 changes at " + at);
            o.check(std::abs(ra.K - rb.K) <= kSameK * ra.K, "K changes at " + at);
            o.check(std::isfinite(ra.K) && ra.K >= 1.0, "K finite at " + at);
            o.check(rb.ratio_min > 0 && std::isfinite(rb.ratio_spread), "measure comparability at " + at);
            // Admissibility: every patch meets at most n0 patches.
            auto G = intersection_graph(b);
            std::size_t deg = 0;
            for (const auto& nb : G) deg = std::max(deg, nb.size());
            o.check(int(deg) <= rb.n0, "degree exceeds n0 at " + at);
            o.detail << at << ": n0=" << rb.n0 << " K=" << fmt(rb.K) << " spread=" << fmt(rb.ratio_spread) << "; ";
            ++cases;
        }
    o.detail << cases << " coverings";
}

// 3. Counting lemma statistics at T and 2T.
void c3(Outcome& o) {
    struct Pair {
        double a1, a2;
    };
    for (Pair pr : {Pair{0.0, 1.0}, Pair{0.0, 0.5}, Pair{0.5, 1.0}}) {
        auto stats = [&](double T) {
            Covering c1 = build_ball_covering(1, pr.a1, std::nullopt, T);
            Covering c2 = pr.a2 == 1.0 ? build_dyadic_covering(1, T) : build_ball_covering(1, pr.a2, std::nullopt, T);
            return counting_statistics(c1, c2, neighbor_map(c1, c2));
        };
        auto s1 = stats(200.0), s2 = stats(400.0);
        const std::string at = "(" + fmt(pr.a1) + "," + fmt(pr.a2) + ")";
        o.check(std::abs(s1.omega_ratio_max / s2.omega_ratio_max - 1.0) <= kCountingStability, "omega ratio at " + at);
        o.check(s1.lambda_max == s2.lambda_max, "lambda max at " + at);
        o.detail << at << ": omega ratio " << fmt(s1.omega_ratio_max) << " -> " << fmt(s2.omega_ratio_max)
                 << ", lambda " << s1.lambda_max << "; ";
    }
}

// 4. Partition certificates on n = 2^16.
void c4(Outcome& o) {
    GridSpec g{1, 1 << 16, 64};
    for (double alpha : {0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0}) {
        Bapu B = alpha == 1.0 ? build_bapu(build_dyadic_covering(1, 1000.0), g)
                              : build_bapu(build_ball_covering(1, alpha, std::nullopt, 1000.0), g);
        auto rep = certify_partition(B);
        const int n0 = B.covering.height_n0;
        const std::string at = "alpha=" + fmt(alpha);
        o.check(rep.sum_error <= kSumToOne, "sum to one at " + at);
        o.check(rep.square_sum_min >= kSquareSumFactor / double(n0 * n0), "square sum at " + at);
        o.check(rep.support_ok, "support at " + at);
        double worst = -HUGE_VAL;
        for (const auto& r : certify_derivative_scaling(B, 3, kSlope)) {
            o.check(r.passed, r.label + " at " + at);
            worst = std::max(worst, r.slope);
        }
        for (Exponent p : {P(1), P(2), kInf}) {
            auto r = certify_fourier_growth(B, p, kSlope);
            o.check(r.passed, r.label + " at " + at);
            worst = std::max(worst, r.slope);
        }
        o.detail << at << ": sum err " << fmt(rep.sum_error) << ", sq min " << fmt(rep.square_sum_min) << " (n0=" << n0
                 << "), max slope " << fmt(worst) << "; ";
    }
}

// 5. ||f||_{M^{s,alpha}_{2,2}} / ||f||_{H^s} over 50 band-limited signals.
void c5(Outcome& o) {
    const double T = 200.0, radius = 150.0;
    const int count = 50;
    auto run = [&](const GridSpec& g, double alpha, double s) {
        Bapu B = alpha == 1.0 ? build_bapu(build_dyadic_covering(1, T), g)
                              : build_bapu(build_ball_covering(1, alpha, std::nullopt, T), g);
        double lo = HUGE_VAL, hi = 0;
        for (int seed = 0; seed < count; ++seed) {
            auto F = random_bandlimited_spectrum(g, std::uint64_t(seed), {radius, 0.5, 0.25});
            double r = assemble_norm(piece_table(F, B, {P(2)}), P(2), P(2), s) / sobolev_norm(F, s);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        return std::make_pair(lo, hi);
    };
    GridSpec g1{1, 8192, 32}, g2{1, 16384, 64};
    for (double alpha : {0.0, 0.5, 1.0})
        for (double s : {-1.0, 0.0, 2.0}) {
            auto [lo, hi] = run(g1, alpha, s);
            auto [lo2, hi2] = run(g2, alpha, s);
            const std::string at = "alpha=" + fmt(alpha) + " s=" + fmt(s);
            o.check(lo > 0 && hi / lo <= kWindow, "window at " + at);
            o.check(std::abs(lo2 / lo - 1) <= kGridStability && std::abs(hi2 / hi - 1) <= kGridStability,
                    "grid stability at " + at);
            o.detail << at << ": [" << fmt(lo) << ", " << fmt(hi) << "]; ";
        }
}

// 6. Embeddings over 25 exponent pairs, three alpha pairs and s in {0, 1}.
void c6(Outcome& o) {
    const double T = 64.0, radius = 48.0;
    const int count = 9;
    const std::vector<Exponent> ex{P(1), Exponent::from_p(Rational(4, 3)), P(2), P(4), kInf};
    GridSpec grids[2] = {{1, 4096, 32}, {1, 8192, 64}};
    struct Pair {
        double a1, a2;
    };
    double worst_gap = 0, worst_ratio = 0;
    int cases = 0;
    for (Pair pr : {Pair{0.0, 0.5}, Pair{0.0, 1.0}, Pair{0.5, 1.0}}) {
        std::vector<EmbeddingResult> res[2];
        for (int gi = 0; gi < 2; ++gi) {
            const GridSpec& g = grids[gi];
            auto signals = embedding_signals(g, 5, count, radius);
            Bapu b1 = scale_bapu(1, pr.a1, T, g), b2 = scale_bapu(1, pr.a2, T, g);
            EmbeddingData D = embedding_tables(signals, b1, b2, ex);
            for (Exponent p : ex)
                for (Exponent q : ex)
                    for (double s : {0.0, 1.0})
                        for (Direction dir : {Direction::Upper, Direction::Lower})
                            res[gi].push_back(evaluate_embedding({1, pr.a1, pr.a2, p, q, s, dir}, D));
        }
        for (std::size_t k = 0; k < res[0].size(); ++k) {
            const auto& r = res[0][k];
            const std::string at = "(" + fmt(pr.a1) + "," + fmt(pr.a2) + ") p=" + r.c.p.str() + " q=" + r.c.q.str() +
                                   " s=" + fmt(r.c.s) + " " + direction_name(r.c.direction);
            o.check(duality_holds(r.c.p, r.c.q), "duality at " + at);
            if (r.c.direction == Direction::Lower) {
                // Lower shift is the negated upper shift at the dual exponents.
                EmbeddingCase up{1, pr.a1, pr.a2, r.c.p.conjugate(), r.c.q.conjugate(), 0.0, Direction::Upper};
                o.check(r.shift == -embedding_shift(up), "dual shift at " + at);
            }
            o.check(std::isfinite(r.worst_ratio) && r.worst_ratio > 0 && r.signals_used == count, "finite at " + at);
            double gap = relative_gap(res[1][k].worst_ratio, r.worst_ratio);
            o.check(gap <= kGridStability, "grid stability at " + at);
            worst_gap = std::max(worst_gap, gap);
            worst_ratio = std::max(worst_ratio, r.worst_ratio);
            ++cases;
        }
    }
    o.detail << cases << " cases, largest ratio " << fmt(worst_ratio) << ", worst grid gap " << fmt(worst_gap);
}

// 7. Growth of extremal families above the threshold, flat at it.
void c7(Outcome& o) {
    auto config = [](Exponent p, Exponent q, double rp, double first, std::size_t n) {
        SharpnessConfig c;
        c.p = p;
        c.q = q;
        c.rp = rp;
        c.first_center = first;
        c.n = n;
        return c;
    };
    for (const auto& c : {config(P(2), P(2), 0.1, 40.0, 1 << 19), config(P(1), P(1), 0.1, 40.0, 1 << 19),
                          config(P(2), kInf, 0.08, 160.0, 1 << 18)}) {
        auto G = sharpness_experiment(sharpness_setup(c));
        const std::string at = "(" + c.p.str() + "," + c.q.str() + ")";
        o.check(G.growth_above >= kGrowth, "growth above threshold at " + at);
        o.check(G.band_at <= kBand, "band at threshold at " + at);
        o.detail << at << " " << bump_mode_name(G.mode) << ": threshold " << fmt(G.threshold) << ", rho(64)/rho(4) "
                 << fmt(G.growth_above) << ", band " << fmt(G.band_at) << "; ";
    }
}

// 8. Brushlet frame roundtrip, norm equivalence and Gram deviation.
void c8(Outcome& o) {
    const double T = 64.0, radius = 60.0;
    const int count = 20;
    for (double alpha : {0.0, 0.5}) {
        EquivalenceReport rep[2];
        GramReport gram;
        GridSpec grids[2] = {{1, 4096, 32}, {1, 8192, 64}};
        for (int gi = 0; gi < 2; ++gi) {
            BrushletFrame F = build_brushlet_frame(1, alpha, T, grids[gi]);
            std::vector<SpectralSignal> sig;
            for (int seed = 0; seed < count; ++seed)
                sig.push_back(random_bandlimited_spectrum(F.grid, std::uint64_t(seed), {radius, 0.5, 0.25}));
            rep[gi] = frame_norm_equivalence(sig, F, {alpha, P(2), P(2), 0.0});
            if (gi == 0) gram = gram_report(F);
        }
        const std::string at = "alpha=" + fmt(alpha);
        o.check(rep[0].roundtrip_max <= kRoundtrip && rep[1].roundtrip_max <= kRoundtrip, "roundtrip at " + at);
        double dis = interval_disagreement(rep[0], rep[1]);
        o.check(rep[0].ratio_min > 0 && dis <= kGridStability, "norm equivalence stability at " + at);
        o.detail << at << ": roundtrip " << fmt(std::max(rep[0].roundtrip_max, rep[1].roundtrip_max)) << ", ratios ["
                 << fmt(rep[0].ratio_min) << ", " << fmt(rep[0].ratio_max) << "], doubling change " << fmt(dis)
                 << ", Gram delta " << fmt(gram.delta) << "; ";
    }
}

// 9. Two CLI runs with the same config and seed give identical artifacts.
void c9(Outcome& o) {
    const fs::path root = fs::temp_directory_path() / "alphamod_acceptance_c9";
    fs::remove_all(root);
    const std::vector<std::string> runs{
        "covering --alpha 0.5 -d 2 --trunc 40",
        "norm --signal random_bandlimited --seed 11 -p 1,2,inf -q 1,inf --alpha 0.5 -s 0,1",
        "embed --seed 7",
        "sharpness -p 2 -q inf --rp 0.08 --first-center 160 -n 262144",
        "frame --seed 7 --alpha 0",
    };
    for (const char* tag : {"a", "b"})
        for (const auto& args : runs) {
            std::string cmd = std::string(ALPHAMOD_CLI_PATH) + " " + args + " --out " + (root / tag).string() +
                              " > /dev/null 2>&1";
            int code = std::system(cmd.c_str());
            o.check(code == 0, "exit status of '" + args + "'");
        }
    int compared = 0;
    for (const auto& e : fs::directory_iterator(root / "a")) {
        const auto ext = e.path().extension();
        if (ext != ".csv" && ext != ".json") continue;
        fs::path other = root / "b" / e.path().filename();
        o.check(fs::exists(other) && io::read_text(e.path()) == io::read_text(other), e.path().filename().string());
        ++compared;
    }
    o.check(compared == 8, "artifact count " + std::to_string(compared));
    o.detail << compared << " artifacts byte-identical across reruns";
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "index algebra", 1, c1},
        {2, "covering certificates", 30, c2},
        {3, "counting lemma", 60, c3},
        {4, "partition certificates", 120, c4},
        {5, "M2 equals H_s", 120, c5},
        {6, "embedding", 600, c6},
        {7, "sharpness growth", 600, c7},
        {8, "brushlet frame", 300, c8},
        {9, "determinism", 600, c9},
    };
    bool ok = true;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.check(secs <= c.budget_s, "runtime above " + fmt(c.budget_s) + " s");
        std::cout << "C" << c.id << " " << (o.pass ? "PASS" : "FAIL") << " " << c.name << " (" << fmt(secs)
                  << " s): " << o.detail.str() << std::endl;
        ok = ok && o.pass;
    }
    return ok ? 0 : 1;
}
