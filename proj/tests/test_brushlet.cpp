#include <gtest/gtest.h>

#include <alphamod/brushlet.hpp>
#include <alphamod/test_signals.hpp>

#include <sstream>

using namespace alphamod;

namespace {

SpaceParams params(double alpha, Exponent p, Exponent q, double s) {
    SpaceParams sp;
    sp.alpha = alpha;
    sp.p = p;
    sp.q = q;
    sp.s = s;
    return sp;
}

Exponent P(long p) { return Exponent::from_p(p); }

const BrushletFrame& half_frame() {
    static const BrushletFrame F = build_brushlet_frame(1, 0.5, 64.0, GridSpec{1, 4096, 32});
    return F;
}

SpectralSignal band_signal(const GridSpec& g, std::uint64_t seed, double radius = 60.0) {
    return random_bandlimited_spectrum(g, seed, {radius, 0.5, 0.25});
}

double rel_err(const SpectralSignal& a, const SpectralSignal& b) {
    double num = 0, den = 0;
    for (std::size_t j = 0; j < a.coeffs.size(); ++j) {
        num += std::norm(a.coeffs[j] - b.coeffs[j]);
        den += std::norm(b.coeffs[j]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::size_t cell_of(const BrushletFrame& F, int k) {
    for (std::size_t i = 0; i < F.size(); ++i)
        if (F.cells[i].id.k[0] == k) return i;
    throw std::runtime_error("no cell");
}

// Inverse unitary transform of the bell by midpoint quadrature on [0, 1].
cplx bell_spatial(const Bell& b, double t) {
    const int N = 8192;
    cplx acc = 0;
    for (int j = 0; j < N; ++j) {
        double u = (j + 0.5) / N;
        acc += b(u) * std::polar(1.0, u * t);
    }
    return acc / double(N) / std::sqrt(2 * kPi);
}

}  // namespace

TEST(Brushlet, CosineOffset) {
    IntervalSpec I{0.0, kPi};
    EXPECT_DOUBLE_EQ(I.e(0), 0.5);
    EXPECT_DOUBLE_EQ(I.e(3), 3.5);
}

TEST(Brushlet, BellShape) {
    Bell b;
    EXPECT_EQ(b(0.0), 0.0);
    EXPECT_EQ(b(1.0), 0.0);
    EXPECT_EQ(b(0.5), 1.0);
    EXPECT_EQ(b(b.delta), 1.0);
    EXPECT_EQ(b(1 - b.delta), 1.0);
    for (double u = 0.001; u < 1; u += 0.01) EXPECT_NEAR(b(u), b(1 - u), 1e-14);
}

TEST(Brushlet, AtomMatchesSpatialFormula) {
    GridSpec g{1, 2048, 128};
    BrushletFrame F = build_brushlet_frame(1, 0.0, 8.0, g);
    std::size_t ci = cell_of(F, 3);
    const auto& I = F.cells[ci].interval[0];
    for (int n : {0, 1, 4}) {
        BrushletAtom A = build_atom(F, ci, {n, 0});
        EXPECT_EQ(atom_leaked_mass(A), 0.0);
        double mx = 0;
        for (auto v : A.samples.samples) mx = std::max(mx, std::abs(v));
        const double mu = I.mu(), e = I.e(n);
        for (std::int64_t j = 0; j < std::int64_t(g.n); j += 37) {
            double x = g.x(j);
            if (std::abs(x) > 20) continue;
            cplx ref = std::sqrt(mu / 2) * std::polar(1.0, I.a * x) *
                       (bell_spatial(F.g, mu * (x + e)) + bell_spatial(F.g, mu * (x - e)));
            EXPECT_NEAR(std::abs(A.samples.samples[std::size_t(j)] - ref), 0.0, 1e-8 * mx) << "n=" << n << " x=" << x;
        }
    }
}

TEST(Brushlet, AtomNormMatchesGramDiagonal) {
    const auto& F = half_frame();
    std::size_t ci = cell_of(F, 4);
    auto G = gram_matrix(F, ci, 0, 8);
    for (int n = 0; n < 8; ++n) {
        BrushletAtom A = build_atom(F, ci, {n, 0});
        double l2 = sobolev_norm(A.spectrum, 0);
        EXPECT_NEAR(l2 * l2, G[std::size_t(n * 8 + n)], 1e-12);
        EXPECT_NEAR(lp_norm(A.samples, P(2)), l2, 1e-12);
    }
    auto rep = gram_report(F);
    EXPECT_GT(rep.diag_min, 0.5);
    EXPECT_LE(rep.diag_max, 1.0 + 1e-12);
    EXPECT_LT(rep.delta, 0.5);
}

TEST(Brushlet, SingleAtomGivesGramColumn) {
    const auto& F = half_frame();
    std::size_t ci = cell_of(F, -3);
    const int m = 5;
    BrushletAtom A = build_atom(F, ci, {m, 0});
    AnalyzeOptions full;
    full.truncate = false;
    CoeffArray c = analyze(A.spectrum, F, full);
    const auto& b = c.blocks[ci];
    const int M = F.cells[ci].M[0];
    auto G = gram_matrix(F, ci, 0, M);
    int best = 0;
    for (int n = 0; n < M; ++n) {
        EXPECT_NEAR(b.at(n).real(), G[std::size_t(n * M + m)], 1e-12);
        EXPECT_NEAR(b.at(n).imag(), 0.0, 1e-12);
        if (std::abs(b.at(n)) > std::abs(b.at(best))) best = n;
    }
    EXPECT_EQ(best, m);
}

TEST(Brushlet, AnalysisMatchesSpatialInnerProducts) {
    const auto& F = half_frame();
    const auto& g = F.grid;
    SpectralSignal S = band_signal(g, 3);
    Signal f = fft_inverse(S);
    AnalyzeOptions full;
    full.truncate = false;
    CoeffArray c = analyze(S, F, full);
    for (int k : {-6, 1, 2, 7})
        for (int n : {0, 3, 17}) {
            std::size_t ci = cell_of(F, k);
            BrushletAtom A = build_atom(F, ci, {n, 0});
            cplx ip = 0;
            for (std::size_t j = 0; j < g.n; ++j) ip += f.samples[j] * std::conj(A.samples.samples[j]);
            ip *= g.dx();
            EXPECT_NEAR(std::abs(c.blocks[ci].at(n) - ip), 0.0, 1e-11 * (1 + std::abs(ip))) << k << "," << n;
        }
}

TEST(Brushlet, ZeroAndLinearity) {
    const auto& F = half_frame();
    const auto& g = F.grid;
    CoeffArray z = analyze(SpectralSignal(g), F);
    EXPECT_EQ(z.nnz(), 0u);
    for (const auto& v : synthesize_spectral(z, F).coeffs) EXPECT_EQ(v, cplx(0));

    SpectralSignal a = band_signal(g, 1), b = band_signal(g, 2), ab(g);
    for (std::size_t j = 0; j < ab.coeffs.size(); ++j) ab.coeffs[j] = a.coeffs[j] + cplx(0, 2) * b.coeffs[j];
    AnalyzeOptions full;
    full.truncate = false;
    CoeffArray ca = analyze(a, F, full), cb = analyze(b, F, full), cab = analyze(ab, F, full);
    double scale = std::sqrt(cab.energy());
    for (std::size_t i = 0; i < F.size(); ++i)
        for (std::size_t l = 0; l < cab.blocks[i].c.size(); ++l)
            EXPECT_NEAR(std::abs(cab.blocks[i].c[l] - ca.blocks[i].c[l] - cplx(0, 2) * cb.blocks[i].c[l]), 0.0,
                        1e-12 * scale);
    auto ra = synthesize_spectral(ca, F), rb = synthesize_spectral(cb, F), rab = synthesize_spectral(cab, F);
    for (std::size_t j = 0; j < rab.coeffs.size(); ++j)
        EXPECT_NEAR(std::abs(rab.coeffs[j] - ra.coeffs[j] - cplx(0, 2) * rb.coeffs[j]), 0.0, 1e-12 * scale);
}

TEST(Brushlet, RoundTrip) {
    for (double alpha : {0.0, 0.5}) {
        BrushletFrame F = build_brushlet_frame(1, alpha, 64.0, GridSpec{1, 4096, 32});
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            SpectralSignal S = band_signal(F.grid, seed);
            CoeffArray c = analyze(S, F);
            EXPECT_LE(rel_err(synthesize_spectral(c, F), S), 1e-6) << alpha << " seed " << seed;
            AnalyzeOptions full;
            full.truncate = false;
            EXPECT_LE(rel_err(synthesize_spectral(analyze(S, F, full), F), S), 1e-13);
            EXPECT_LT(c.nnz(), analyze(S, F, full).nnz());
        }
    }
}

TEST(Brushlet, TruncationDiscardsOnlySmallCoefficients) {
    const auto& F = half_frame();
    SpectralSignal S = band_signal(F.grid, 11);
    AnalyzeOptions full;
    full.truncate = false;
    CoeffArray all = analyze(S, F, full), kept = analyze(S, F);
    double f = sobolev_norm(S, 0);
    double omitted = 0;
    for (std::size_t i = 0; i < F.size(); ++i)
        for (int n = kept.blocks[i].count[0]; n < all.blocks[i].count[0]; ++n) {
            EXPECT_LE(std::abs(all.blocks[i].at(n)), 1e-7 * f);
            omitted += std::norm(all.blocks[i].at(n));
        }
    EXPECT_LE(omitted, 1e-14 * f * f);
}

TEST(Brushlet, SequenceNorm) {
    CoeffArray c;
    c.d = 1;
    CoeffBlock b;
    b.id = PatchId::lattice(4);
    b.k_norm = 4;
    b.count = {3, 1};
    b.c = {0.0, 1.0, 0.0};
    c.blocks = {b};
    // p = 2 removes the alpha d term; weight |k|^{s/(1-alpha)}.
    EXPECT_DOUBLE_EQ(sequence_norm(c, params(0.5, P(2), P(1), 0.0)), 1.0);
    EXPECT_NEAR(sequence_norm(c, params(0.5, P(2), P(1), 1.0)), 16.0, 1e-12);
    EXPECT_NEAR(sequence_norm(c, params(0.5, P(1), P(3), 0.5)), std::pow(4.0, (0.5 + 0.5 * (0.5 - 1.0)) / 0.5), 1e-12);

    CoeffBlock b2 = b;
    b2.id = PatchId::lattice(-2);
    b2.k_norm = 2;
    b2.c = {cplx(3, 4), 1.0, 0.0};
    c.blocks.push_back(b2);
    for (Exponent p : {P(1), P(2), P(3)}) {
        auto sp = params(0.0, p, p, 0.7);
        double direct = 0;
        for (const auto& blk : c.blocks)
            for (auto v : blk.c) direct += std::pow(std::pow(blk.k_norm, 0.7) * std::abs(v), p.value());
        EXPECT_NEAR(sequence_norm(c, sp), std::pow(direct, 1 / p.value()), 1e-12);
    }
    EXPECT_DOUBLE_EQ(sequence_norm(c, params(0.0, Exponent::infinity(), Exponent::infinity(), 0.0)), 5.0);
}

TEST(Brushlet, NormEquivalenceScalesAndIsStable) {
    auto run = [](std::size_t n, double L) {
        BrushletFrame F = build_brushlet_frame(1, 0.5, 64.0, GridSpec{1, n, L});
        std::vector<SpectralSignal> sig;
        for (std::uint64_t seed = 0; seed < 6; ++seed) sig.push_back(band_signal(F.grid, seed));
        return frame_norm_equivalence(sig, F, params(0.5, P(2), P(2), 0.0));
    };
    auto a = run(4096, 32), b = run(8192, 64);
    EXPECT_GT(a.ratio_min, 0.0);
    EXPECT_LE(a.roundtrip_max, 1e-6);
    EXPECT_LE(interval_disagreement(a, b), 0.1);

    const auto& F = half_frame();
    SpectralSignal S = band_signal(F.grid, 5), S2 = S;
    for (auto& v : S2.coeffs) v *= 2.0;
    auto r1 = frame_norm_equivalence({S}, F, params(0.5, P(1), P(2), 0.5));
    auto r2 = frame_norm_equivalence({S2}, F, params(0.5, P(1), P(2), 0.5));
    EXPECT_NEAR(r1.ratios[0], r2.ratios[0], 1e-9 * r1.ratios[0]);
}

TEST(Brushlet, SingleAtomRatio) {
    const auto& F = half_frame();
    auto interior = interior_windows(F.bapu);
    int used = 0;
    for (std::size_t ci : interior) {
        const auto& I = F.cells[ci].interval[0];
        if (std::max(std::abs(I.a), std::abs(I.b)) > F.bapu.covering.trunc_radius) continue;
        auto r = frame_norm_equivalence({build_atom(F, ci, {2, 0}).spectrum}, F, params(0.5, P(2), P(2), 1.0));
        EXPECT_TRUE(std::isfinite(r.ratios[0]));
        EXPECT_GT(r.ratios[0], 0.0);
        ++used;
    }
    EXPECT_GE(used, 4);
}

TEST(Brushlet, SynthesisBounded) {
    const auto& F = half_frame();
    auto r = synthesis_boundedness(F, params(0.5, P(2), P(2), 0.0), 17);
    EXPECT_EQ(r.trials, 20);
    EXPECT_GT(r.ratio_min, 0.0);
    EXPECT_LE(r.ratio_max / r.ratio_min, 10.0);
}

TEST(Brushlet, TwoDimensionalRoundTrip) {
    BrushletFrame F = build_brushlet_frame(2, 1.0 / 3.0, 12.0, GridSpec{2, 256, 8});
    SpectralSignal S = random_bandlimited_spectrum(F.grid, 4, {10.0, 1.0, 0.3});
    CoeffArray c = analyze(S, F);
    EXPECT_LE(rel_err(synthesize_spectral(c, F), S), 1e-6);
    auto G = gram_report(F, 8);
    EXPECT_LE(G.diag_max, 1.0 + 1e-12);
}

TEST(Brushlet, RejectsGridTooSmall) {
    EXPECT_THROW(build_brushlet_frame(1, 0.5, 64.0, GridSpec{1, 2048, 32}), std::invalid_argument);
    EXPECT_THROW(build_brushlet_frame(1, 1.0, 64.0, GridSpec{1, 4096, 32}), std::invalid_argument);
}

TEST(Brushlet, CoefficientCsv) {
    CoeffArray c;
    c.d = 1;
    CoeffBlock b;
    b.id = PatchId::lattice(-2);
    b.count = {2, 1};
    b.c = {cplx(1, -0.5), cplx(0.25, 0)};
    c.blocks = {b};
    std::ostringstream os;
    write_coefficients_csv(os, c);
    EXPECT_EQ(os.str(), "k,n,re,im\n-2,0,1,-0.5\n-2,1,0.25,0\n");
}
