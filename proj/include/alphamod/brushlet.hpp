#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bapu.hpp"
#include "covering.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "indices.hpp"
#include "signal.hpp"

namespace alphamod {

struct IntervalSpec {
    double a = 0.0;
    double b = 1.0;
    double mu() const { return b - a; }
    // Spatial offset of the n-th local cosine: pi (n + 1/2) / mu.
    double e(int n) const { return kPi * (n + 0.5) / mu(); }
};

// Spectral bell: smooth on [0, 1], equal to 1 on [delta, 1 - delta].
struct Bell {
    double delta = 0.125;
    double operator()(double u) const { return smooth_step(u / delta) * smooth_step((1.0 - u) / delta); }
};

// One frame cell: the atom cube Q_k snapped to half-integer grid positions so
// that the spectral samples sit at u_j = (j + 1/2) / M.
struct FrameCell {
    PatchId id;
    double k_norm = 1.0;  // Euclidean norm of the lattice index
    std::array<IntervalSpec, 2> interval{};
    std::array<int, 2> M{1, 1};
    IndexBox box;
    std::array<std::vector<double>, 2> bell;  // bell samples per axis
};

struct BrushletFrame {
    GridSpec grid;
    double alpha = 0.0;
    Bell g;
    Bapu bapu;  // psi_k on the cube covering with the same centers
    std::vector<FrameCell> cells;

    int d() const { return grid.d; }
    std::size_t size() const { return cells.size(); }
};

struct FrameOptions {
    std::optional<double> r;   // cube covering parameter, certified default when empty
    double bell_delta = 0.125;
    double sample_density = 4.0;
};

namespace detail {

inline double lattice_norm(const PatchId& id, int d) {
    return d == 1 ? std::abs(double(id.k[0])) : std::hypot(double(id.k[0]), double(id.k[1]));
}

// DCT-IV along each active axis of a row-major M0 x M1 block.
inline void dct4_axes(std::vector<double>& a, const std::array<int, 2>& M, int d) {
    const int m0 = M[0], m1 = M[1];
    if (d == 2)
        for (int i = 0; i < m0; ++i) fft::dct4_inplace(a.data() + std::size_t(i) * std::size_t(m1), m1);
    if (m1 == 1) {
        fft::dct4_inplace(a.data(), m0);
        return;
    }
    std::vector<double> col(static_cast<std::size_t>(m0));
    for (int j = 0; j < m1; ++j) {
        for (int i = 0; i < m0; ++i) col[std::size_t(i)] = a[std::size_t(i) * std::size_t(m1) + std::size_t(j)];
        fft::dct4_inplace(col.data(), m0);
        for (int i = 0; i < m0; ++i) a[std::size_t(i) * std::size_t(m1) + std::size_t(j)] = col[std::size_t(i)];
    }
}

inline double psi_at(const WindowSymbol& w, std::int64_t i0, std::int64_t i1) { return w.samples.at(i0, i1); }

}  // namespace detail

inline BrushletFrame build_brushlet_frame(int d, double alpha, double trunc_radius, const GridSpec& g,
                                          const FrameOptions& opt = {}) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("brushlet frame: alpha must lie in [0, 1)");
    if (!(opt.bell_delta > 0.0 && opt.bell_delta < 0.5)) throw std::invalid_argument("brushlet frame: bell delta in (0, 1/2)");
    BrushletFrame F;
    F.grid = g;
    F.alpha = alpha;
    F.g = Bell{opt.bell_delta};
    F.bapu = build_bapu(build_cube_covering(d, alpha, opt.r, trunc_radius, opt.sample_density), g);
    const double dxi = g.dxi();
    const auto& C = F.bapu.covering;
    F.cells.resize(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) {
        const auto& P = C.patches[i];
        auto& cell = F.cells[i];
        cell.id = P.id;
        cell.k_norm = detail::lattice_norm(P.id, d);
        const double h = P.radius / (1.0 - 2.0 * F.g.delta) + 2.0 * dxi;
        for (int a = 0; a < d; ++a) {
            std::int64_t lo = g.index_at_or_above(P.center[std::size_t(a)] - h);
            std::int64_t hi = g.index_past(P.center[std::size_t(a)] + h);
            if (lo == 0 || hi == std::int64_t(g.n))
                throw std::invalid_argument("brushlet frame: atom cube around " + P.id.str(d) +
                                            " leaves the spectral grid; increase n");
            cell.box.lo[std::size_t(a)] = lo;
            cell.box.hi[std::size_t(a)] = hi;
            cell.M[std::size_t(a)] = int(hi - lo);
            double left = g.xi(lo) - 0.5 * dxi;
            cell.interval[std::size_t(a)] = {left, left + double(hi - lo) * dxi};
            auto& bell = cell.bell[std::size_t(a)];
            bell.resize(std::size_t(hi - lo));
            for (std::int64_t j = 0; j < hi - lo; ++j) bell[std::size_t(j)] = F.g((double(j) + 0.5) / double(hi - lo));
        }
        if (d == 1) cell.bell[1] = {1.0};
        // The bell must be flat wherever psi_k is nonzero.
        const auto& w = F.bapu.windows[i].samples;
        for (std::int64_t i0 = w.box.lo[0]; i0 < w.box.hi[0]; ++i0)
            for (std::int64_t i1 = w.box.lo[1]; i1 < w.box.hi[1]; ++i1) {
                if (w.values[w.box.local(i0, i1)] == 0.0) continue;
                if (!cell.box.contains(i0, i1) ||
                    cell.bell[0][std::size_t(i0 - cell.box.lo[0])] * cell.bell[1][std::size_t(i1 - cell.box.lo[1])] != 1.0)
                    throw CertificationError("brushlet frame: bell is not flat on the window of " + P.id.str(d));
            }
    }
    return F;
}

// Retained coefficients of one cell; c[n0 * count[1] + n1] with n_a < count[a].
struct CoeffBlock {
    PatchId id;
    double k_norm = 1.0;
    std::array<int, 2> count{0, 1};
    std::vector<cplx> c;

    cplx at(int n0, int n1 = 0) const {
        if (n0 < 0 || n1 < 0 || n0 >= count[0] || n1 >= count[1]) return 0.0;
        return c[std::size_t(n0) * std::size_t(count[1]) + std::size_t(n1)];
    }
    int cutoff() const { return std::max(count[0], count[1]) - 1; }
};

struct CoeffArray {
    int d = 1;
    std::vector<CoeffBlock> blocks;  // aligned with the frame cells

    std::size_t nnz() const {
        std::size_t s = 0;
        for (const auto& b : blocks) s += b.c.size();
        return s;
    }
    double energy() const {
        double s = 0;
        for (const auto& b : blocks)
            for (const auto& v : b.c) s += std::norm(v);
        return s;
    }
};

struct AnalyzeOptions {
    // Omitted coefficients carry at most this fraction of ||f||^2, split evenly over active cells.
    double tail_energy = 1e-14;
    bool truncate = true;
};

// Full coefficient block (all n with n_a < M_a) of one cell.
inline std::vector<cplx> analyze_cell(const BrushletFrame& F, const SpectralSignal& S, std::size_t i) {
    const auto& cell = F.cells[i];
    const auto& g = F.grid;
    const int d = g.d;
    const std::size_t m = std::size_t(cell.M[0]) * std::size_t(cell.M[1]);
    std::vector<double> re(m), im(m);
    for (int j0 = 0; j0 < cell.M[0]; ++j0)
        for (int j1 = 0; j1 < cell.M[1]; ++j1) {
            std::size_t l = std::size_t(j0) * std::size_t(cell.M[1]) + std::size_t(j1);
            cplx v = S.coeffs[g.offset(cell.box.lo[0] + j0, cell.box.lo[1] + j1)] * cell.bell[0][std::size_t(j0)] *
                     cell.bell[1][std::size_t(j1)];
            re[l] = v.real();
            im[l] = v.imag();
        }
    detail::dct4_axes(re, cell.M, d);
    detail::dct4_axes(im, cell.M, d);
    double scale = 1.0;
    for (int a = 0; a < d; ++a) scale *= g.dxi() * std::sqrt(2.0 / cell.interval[std::size_t(a)].mu()) * 0.5;
    std::vector<cplx> out(m);
    for (std::size_t l = 0; l < m; ++l) out[l] = scale * cplx(re[l], im[l]);
    return out;
}

// The coefficient operator D: c_{n,k} = (f, w_{n,k}).
inline CoeffArray analyze(const SpectralSignal& S, const BrushletFrame& F, const AnalyzeOptions& opt = {}) {
    if (!(S.grid == F.grid)) throw std::invalid_argument("analyze: signal and frame grids differ");
    const int d = F.d();
    const std::size_t K = F.size();
    std::vector<std::vector<cplx>> full(K);
    parallel_for(K, [&](std::size_t i) { full[i] = analyze_cell(F, S, i); });

    CoeffArray out;
    out.d = d;
    out.blocks.resize(K);
    std::vector<std::vector<double>> shell(K);
    std::size_t active = 0;
    for (std::size_t i = 0; i < K; ++i) {
        const auto& cell = F.cells[i];
        shell[i].assign(std::size_t(std::max(cell.M[0], cell.M[1])), 0.0);
        for (int n0 = 0; n0 < cell.M[0]; ++n0)
            for (int n1 = 0; n1 < cell.M[1]; ++n1)
                shell[i][std::size_t(std::max(n0, n1))] +=
                    std::norm(full[i][std::size_t(n0) * std::size_t(cell.M[1]) + std::size_t(n1)]);
        bool any = std::any_of(shell[i].begin(), shell[i].end(), [](double e) { return e > 0; });
        active += any;
    }
    const double f2 = std::pow(sobolev_norm(S, 0.0), 2);
    const double budget = active ? opt.tail_energy * f2 / double(active) : 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        const auto& cell = F.cells[i];
        auto& b = out.blocks[i];
        b.id = cell.id;
        b.k_norm = cell.k_norm;
        int keep = int(shell[i].size());
        if (opt.truncate) {
            double tail = 0;
            keep = 0;
            for (int m = int(shell[i].size()) - 1; m >= 0; --m) {
                if (tail + shell[i][std::size_t(m)] > budget) {
                    keep = m + 1;
                    break;
                }
                tail += shell[i][std::size_t(m)];
            }
        }
        b.count = {std::min(keep, cell.M[0]), d == 2 ? std::min(keep, cell.M[1]) : (keep > 0 ? 1 : 0)};
        if (b.count[0] == 0 || b.count[1] == 0) {
            b.count = {0, d == 2 ? 0 : 1};
            continue;
        }
        b.c.resize(std::size_t(b.count[0]) * std::size_t(b.count[1]));
        for (int n0 = 0; n0 < b.count[0]; ++n0)
            for (int n1 = 0; n1 < b.count[1]; ++n1)
                b.c[std::size_t(n0) * std::size_t(b.count[1]) + std::size_t(n1)] =
                    full[i][std::size_t(n0) * std::size_t(cell.M[1]) + std::size_t(n1)];
    }
    return out;
}

inline CoeffArray analyze(const Signal& f, const BrushletFrame& F, const AnalyzeOptions& opt = {}) {
    return analyze(fft_forward(f), F, opt);
}

// Spectrum of sum_n c_{n,k} w_{n,k} on the cell, before the psi_k filter.
inline std::vector<cplx> synthesize_cell(const BrushletFrame& F, const CoeffBlock& b, std::size_t i) {
    const auto& cell = F.cells[i];
    const int d = F.d();
    if (b.count[0] > cell.M[0] || b.count[1] > cell.M[1])
        throw std::invalid_argument("synthesize: coefficient block exceeds the cell size");
    const std::size_t m = std::size_t(cell.M[0]) * std::size_t(cell.M[1]);
    std::vector<double> re(m, 0.0), im(m, 0.0);
    for (int n0 = 0; n0 < b.count[0]; ++n0)
        for (int n1 = 0; n1 < b.count[1]; ++n1) {
            cplx v = b.c[std::size_t(n0) * std::size_t(b.count[1]) + std::size_t(n1)];
            std::size_t l = std::size_t(n0) * std::size_t(cell.M[1]) + std::size_t(n1);
            re[l] = v.real();
            im[l] = v.imag();
        }
    detail::dct4_axes(re, cell.M, d);
    detail::dct4_axes(im, cell.M, d);
    double scale = 1.0;
    for (int a = 0; a < d; ++a) scale *= std::sqrt(2.0 / cell.interval[std::size_t(a)].mu()) * 0.5;
    std::vector<cplx> out(m);
    for (int j0 = 0; j0 < cell.M[0]; ++j0)
        for (int j1 = 0; j1 < cell.M[1]; ++j1) {
            std::size_t l = std::size_t(j0) * std::size_t(cell.M[1]) + std::size_t(j1);
            out[l] = scale * cell.bell[0][std::size_t(j0)] * cell.bell[1][std::size_t(j1)] * cplx(re[l], im[l]);
        }
    return out;
}

// The reconstruction operator R: sum of c_{n,k} psi_k(D) w_{n,k}.
inline SpectralSignal synthesize_spectral(const CoeffArray& c, const BrushletFrame& F) {
    if (c.blocks.size() != F.size()) throw std::invalid_argument("synthesize: coefficient array does not match the frame");
    const auto& g = F.grid;
    const std::size_t K = F.size();
    std::vector<std::vector<cplx>> parts(K);
    parallel_for(K, [&](std::size_t i) {
        if (!c.blocks[i].c.empty()) parts[i] = synthesize_cell(F, c.blocks[i], i);
    });
    SpectralSignal S(g);
    for (std::size_t i = 0; i < K; ++i) {
        if (parts[i].empty()) continue;
        const auto& cell = F.cells[i];
        const auto& w = F.bapu.windows[i];
        for (int j0 = 0; j0 < cell.M[0]; ++j0)
            for (int j1 = 0; j1 < cell.M[1]; ++j1) {
                std::int64_t i0 = cell.box.lo[0] + j0, i1 = cell.box.lo[1] + j1;
                double psi = detail::psi_at(w, i0, i1);
                if (psi == 0.0) continue;
                S.coeffs[g.offset(i0, i1)] += psi * parts[i][std::size_t(j0) * std::size_t(cell.M[1]) + std::size_t(j1)];
            }
    }
    return S;
}

inline Signal synthesize(const CoeffArray& c, const BrushletFrame& F) { return fft_inverse(synthesize_spectral(c, F)); }

inline double sequence_weight_exponent(const SpaceParams& sp, int d) {
    return (sp.s + sp.alpha * d * (0.5 - sp.p.recip_value())) / (1.0 - sp.alpha);
}

// Weighted mixed norm: inner l^p over n, outer l^q over k, weight |k|^{exponent}.
inline double sequence_norm(const CoeffArray& c, const SpaceParams& sp) {
    sp.validate();
    if (!(sp.alpha < 1.0)) throw std::invalid_argument("sequence_norm: alpha must be below 1");
    const double ex = sequence_weight_exponent(sp, c.d);
    double outer = 0;
    for (const auto& b : c.blocks) {
        double inner = 0;
        for (const auto& v : b.c) {
            double a = std::abs(v);
            if (sp.p.is_infinite())
                inner = std::max(inner, a);
            else if (a > 0)
                inner += std::pow(a, sp.p.value());
        }
        if (!sp.p.is_infinite()) inner = std::pow(inner, sp.p.recip_value());
        double term = std::pow(b.k_norm, ex) * inner;
        if (sp.q.is_infinite())
            outer = std::max(outer, term);
        else if (term > 0)
            outer += std::pow(term, sp.q.value());
    }
    return sp.q.is_infinite() ? outer : std::pow(outer, sp.q.recip_value());
}

struct BrushletAtom {
    std::array<int, 2> n{0, 0};
    PatchId k;
    std::array<IntervalSpec, 2> intervals{};
    SpectralSignal spectrum;
    Signal samples;
};

inline BrushletAtom build_atom(const BrushletFrame& F, std::size_t cell_index, std::array<int, 2> n) {
    const auto& cell = F.cells.at(cell_index);
    const auto& g = F.grid;
    if (n[0] < 0 || n[0] >= cell.M[0] || n[1] < 0 || n[1] >= cell.M[1])
        throw std::out_of_range("build_atom: n outside the cell");
    BrushletAtom A;
    A.n = n;
    A.k = cell.id;
    A.intervals = cell.interval;
    A.spectrum = SpectralSignal(g);
    for (int j0 = 0; j0 < cell.M[0]; ++j0)
        for (int j1 = 0; j1 < cell.M[1]; ++j1) {
            double v = 1.0;
            for (int a = 0; a < g.d; ++a) {
                int j = a == 0 ? j0 : j1;
                int M = cell.M[std::size_t(a)];
                double u = (j + 0.5) / M;
                v *= std::sqrt(2.0 / cell.interval[std::size_t(a)].mu()) * cell.bell[std::size_t(a)][std::size_t(j)] *
                     std::cos(kPi * (n[std::size_t(a)] + 0.5) * u);
            }
            A.spectrum.coeffs[g.offset(cell.box.lo[0] + j0, cell.box.lo[1] + j1)] = v;
        }
    A.samples = fft_inverse(A.spectrum);
    return A;
}

// Fraction of the atom's spectral energy outside the closed cell interval product.
inline double atom_leaked_mass(const BrushletAtom& A) {
    const auto& g = A.spectrum.grid;
    double in = 0, all = 0;
    for (std::int64_t i0 = 0; i0 < std::int64_t(g.n); ++i0)
        for (std::int64_t i1 = 0; i1 < (g.d == 2 ? std::int64_t(g.n) : 1); ++i1) {
            double e = std::norm(A.spectrum.coeffs[g.offset(i0, i1)]);
            all += e;
            bool inside = g.xi(i0) >= A.intervals[0].a && g.xi(i0) <= A.intervals[0].b;
            if (g.d == 2) inside = inside && g.xi(i1) >= A.intervals[1].a && g.xi(i1) <= A.intervals[1].b;
            if (inside) in += e;
        }
    return all > 0 ? (all - in) / all : 0.0;
}

// Gram matrix of the 1-D factors along one axis, n, n' < nmax.
inline std::vector<double> gram_matrix(const BrushletFrame& F, std::size_t cell_index, int axis, int nmax) {
    const auto& cell = F.cells.at(cell_index);
    const int M = cell.M[std::size_t(axis)];
    nmax = std::min(nmax, M);
    const auto& bell = cell.bell[std::size_t(axis)];
    std::vector<double> G(std::size_t(nmax) * std::size_t(nmax), 0.0);
    for (int a = 0; a < nmax; ++a)
        for (int b = a; b < nmax; ++b) {
            double s = 0;
            for (int j = 0; j < M; ++j) {
                double u = (j + 0.5) / M;
                s += bell[std::size_t(j)] * bell[std::size_t(j)] * std::cos(kPi * (a + 0.5) * u) * std::cos(kPi * (b + 0.5) * u);
            }
            G[std::size_t(a) * std::size_t(nmax) + std::size_t(b)] = G[std::size_t(b) * std::size_t(nmax) + std::size_t(a)] =
                2.0 * s / M;
        }
    return G;
}

struct GramReport {
    double diag_min = HUGE_VAL;
    double diag_max = 0.0;
    double offdiag_max = 0.0;
    double delta = 0.0;  // max(|G_nn - 1|, |G_nm|)
    int nmax = 0;
};

// Deviation of (w_{n,k})_n from orthonormality over all cells; for d = 2 the
// tensor Gram is the Kronecker product of the axis Grams.
inline GramReport gram_report(const BrushletFrame& F, int nmax = 64) {
    GramReport R;
    R.nmax = nmax;
    const int d = F.d();
    for (std::size_t i = 0; i < F.size(); ++i) {
        auto G0 = gram_matrix(F, i, 0, nmax);
        int m0 = int(std::lround(std::sqrt(double(G0.size()))));
        std::vector<double> G1{1.0};
        int m1 = 1;
        if (d == 2) {
            G1 = gram_matrix(F, i, 1, nmax);
            m1 = int(std::lround(std::sqrt(double(G1.size()))));
        }
        for (int a0 = 0; a0 < m0; ++a0)
            for (int b0 = 0; b0 < m0; ++b0)
                for (int a1 = 0; a1 < m1; ++a1)
                    for (int b1 = 0; b1 < m1; ++b1) {
                        double v = G0[std::size_t(a0 * m0 + b0)] * G1[std::size_t(a1 * m1 + b1)];
                        if (a0 == b0 && a1 == b1) {
                            R.diag_min = std::min(R.diag_min, v);
                            R.diag_max = std::max(R.diag_max, v);
                        } else {
                            R.offdiag_max = std::max(R.offdiag_max, std::abs(v));
                        }
                    }
    }
    R.delta = std::max({std::abs(R.diag_min - 1.0), std::abs(R.diag_max - 1.0), R.offdiag_max});
    return R;
}

struct EquivalenceReport {
    std::vector<double> ratios;  // ||c||_m / ||f||_M per signal
    double ratio_min = HUGE_VAL;
    double ratio_max = 0.0;
    double roundtrip_max = 0.0;  // max ||R D f - f||_2 / ||f||_2
    std::size_t coefficients_max = 0;
};

inline EquivalenceReport frame_norm_equivalence(const std::vector<SpectralSignal>& signals, const BrushletFrame& F,
                                                const SpaceParams& sp, const AnalyzeOptions& opt = {}) {
    if (std::abs(sp.alpha - F.alpha) > 1e-12) throw std::invalid_argument("frame_norm_equivalence: alpha mismatch");
    EquivalenceReport R;
    for (const auto& S : signals) {
        CoeffArray c = analyze(S, F, opt);
        double m = sequence_norm(c, sp);
        double M = alpha_modulation_norm(S, F.bapu, sp).first;
        double ratio = m / M;
        R.ratios.push_back(ratio);
        R.ratio_min = std::min(R.ratio_min, ratio);
        R.ratio_max = std::max(R.ratio_max, ratio);
        SpectralSignal back = synthesize_spectral(c, F);
        double num = 0, den = 0;
        for (std::size_t j = 0; j < S.coeffs.size(); ++j) {
            num += std::norm(back.coeffs[j] - S.coeffs[j]);
            den += std::norm(S.coeffs[j]);
        }
        R.roundtrip_max = std::max(R.roundtrip_max, den > 0 ? std::sqrt(num / den) : std::sqrt(num));
        R.coefficients_max = std::max(R.coefficients_max, c.nnz());
    }
    return R;
}

// Relative disagreement of two ratio intervals.
inline double interval_disagreement(const EquivalenceReport& a, const EquivalenceReport& b) {
    return std::max(std::abs(a.ratio_min / b.ratio_min - 1.0), std::abs(a.ratio_max / b.ratio_max - 1.0));
}

struct BoundednessReport {
    double ratio_min = HUGE_VAL;
    double ratio_max = 0.0;
    int trials = 0;
};

// ||R c||_M / ||c||_m over random sparse coefficients on interior cells.
inline BoundednessReport synthesis_boundedness(const BrushletFrame& F, const SpaceParams& sp, std::uint64_t seed,
                                               int trials = 20, int entries = 8, int nmax = 16) {
    auto cells = interior_windows(F.bapu);
    if (cells.empty()) throw std::invalid_argument("synthesis_boundedness: frame has no interior cells");
    Rng rng(seed);
    BoundednessReport R;
    for (int t = 0; t < trials; ++t) {
        CoeffArray c;
        c.d = F.d();
        c.blocks.resize(F.size());
        for (std::size_t i = 0; i < F.size(); ++i) {
            c.blocks[i].id = F.cells[i].id;
            c.blocks[i].k_norm = F.cells[i].k_norm;
            c.blocks[i].count = {0, c.d == 2 ? 0 : 1};
        }
        for (int e = 0; e < entries; ++e) {
            std::size_t i = cells[rng.next() % cells.size()];
            auto& b = c.blocks[i];
            const auto& cell = F.cells[i];
            int lim0 = std::min(nmax, cell.M[0]), lim1 = c.d == 2 ? std::min(nmax, cell.M[1]) : 1;
            if (b.c.empty()) {
                b.count = {lim0, lim1};
                b.c.assign(std::size_t(lim0) * std::size_t(lim1), 0.0);
            }
            int n0 = int(rng.next() % std::uint64_t(lim0)), n1 = int(rng.next() % std::uint64_t(lim1));
            b.c[std::size_t(n0) * std::size_t(lim1) + std::size_t(n1)] = cplx(rng.normal(), rng.normal());
        }
        double m = sequence_norm(c, sp);
        double M = alpha_modulation_norm(synthesize_spectral(c, F), F.bapu, sp).first;
        R.ratio_min = std::min(R.ratio_min, M / m);
        R.ratio_max = std::max(R.ratio_max, M / m);
        ++R.trials;
    }
    return R;
}

inline void write_coefficients_csv(std::ostream& os, const CoeffArray& c) {
    os << (c.d == 2 ? "k0,k1,n0,n1,re,im\n" : "k,n,re,im\n");
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& b : c.blocks)
        for (int n0 = 0; n0 < b.count[0]; ++n0)
            for (int n1 = 0; n1 < b.count[1]; ++n1) {
                cplx v = b.at(n0, n1);
                if (c.d == 2)
                    os << b.id.k[0] << ',' << b.id.k[1] << ',' << n0 << ',' << n1;
                else
                    os << b.id.k[0] << ',' << n0;
                os << ',' << num(v.real()) << ',' << num(v.imag()) << '\n';
            }
}

}  // namespace alphamod
