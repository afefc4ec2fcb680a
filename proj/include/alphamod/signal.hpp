#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "band.hpp"
#include "bapu.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "indices.hpp"

namespace alphamod {

struct Signal {
    GridSpec grid;
    std::vector<cplx> samples;

    explicit Signal(const GridSpec& g = {}) : grid(g), samples(g.total(), cplx(0)) {}
    cplx& at(std::size_t j0, std::size_t j1 = 0) { return samples[grid.offset(std::int64_t(j0), std::int64_t(j1))]; }
};

// Spectral samples f^(xi_m), centered order.
struct SpectralSignal {
    GridSpec grid;
    std::vector<cplx> coeffs;

    explicit SpectralSignal(const GridSpec& g = {}) : grid(g), coeffs(g.total(), cplx(0)) {}
};

namespace detail {

inline void check_shape(const GridSpec& g, std::size_t size) {
    g.validate();
    if (size != g.total()) throw std::invalid_argument("sample array does not match the grid");
}

// Moves between centered spectral order and FFT order, applying (-1)^m.
inline void centered_to_fft(const GridSpec& g, const std::vector<cplx>& in, std::vector<cplx>& out) {
    const std::size_t n = g.n, h = n / 2;
    out.resize(in.size());
    for (std::size_t i0 = 0; i0 < n; ++i0)
        for (std::size_t i1 = 0; i1 < (g.d == 2 ? n : 1); ++i1) {
            std::size_t k0 = (i0 + h) % n, k1 = g.d == 2 ? (i1 + h) % n : 0;
            double sgn = (((i0 + (g.d == 2 ? i1 : 0)) - (g.d == 2 ? 2 * h : h)) & 1) ? -1.0 : 1.0;
            out[g.offset(std::int64_t(k0), std::int64_t(k1))] = sgn * in[g.offset(std::int64_t(i0), std::int64_t(i1))];
        }
}

inline void fft_to_centered(const GridSpec& g, const std::vector<cplx>& in, std::vector<cplx>& out) {
    const std::size_t n = g.n, h = n / 2;
    out.resize(in.size());
    for (std::size_t i0 = 0; i0 < n; ++i0)
        for (std::size_t i1 = 0; i1 < (g.d == 2 ? n : 1); ++i1) {
            std::size_t k0 = (i0 + h) % n, k1 = g.d == 2 ? (i1 + h) % n : 0;
            double sgn = (((i0 + (g.d == 2 ? i1 : 0)) - (g.d == 2 ? 2 * h : h)) & 1) ? -1.0 : 1.0;
            out[g.offset(std::int64_t(i0), std::int64_t(i1))] = sgn * in[g.offset(std::int64_t(k0), std::int64_t(k1))];
        }
}

}  // namespace detail

// f^(xi_m) = (2 pi)^{-d/2} dx^d sum_j f(x_j) e^{-i x_j . xi_m}.
inline SpectralSignal fft_forward(const Signal& f) {
    const GridSpec& g = f.grid;
    detail::check_shape(g, f.samples.size());
    std::vector<cplx> buf = f.samples;
    fft::dft_inplace(buf, g.d, int(g.n), int(g.n), FFTW_FORWARD);
    SpectralSignal out(g);
    detail::fft_to_centered(g, buf, out.coeffs);
    const double c = std::pow(2.0 * kPi, -0.5 * g.d) * std::pow(g.dx(), g.d);
    for (auto& v : out.coeffs) v *= c;
    return out;
}

// f(x_j) = (2 pi)^{-d/2} dxi^d sum_m f^(xi_m) e^{i x_j . xi_m}.
inline Signal fft_inverse(const SpectralSignal& F) {
    const GridSpec& g = F.grid;
    detail::check_shape(g, F.coeffs.size());
    std::vector<cplx> buf;
    detail::centered_to_fft(g, F.coeffs, buf);
    fft::dft_inplace(buf, g.d, int(g.n), int(g.n), FFTW_BACKWARD);
    Signal out(g);
    const double c = std::pow(2.0 * kPi, -0.5 * g.d) * std::pow(g.dxi(), g.d);
    for (std::size_t i = 0; i < buf.size(); ++i) out.samples[i] = c * buf[i];
    return out;
}

inline double lp_norm(const Signal& f, Exponent p) {
    double mx = 0, acc = 0;
    const double pv = p.value();
    for (const auto& v : f.samples) {
        double a = std::abs(v);
        if (p.is_infinite())
            mx = std::max(mx, a);
        else
            acc += std::pow(a, pv);
    }
    if (p.is_infinite()) return mx;
    return std::pow(acc * std::pow(f.grid.dx(), f.grid.d), 1.0 / pv);
}

inline double sobolev_norm(const SpectralSignal& F, double s) {
    const GridSpec& g = F.grid;
    double acc = 0;
    const std::int64_t n = std::int64_t(g.n);
    for (std::int64_t i0 = 0; i0 < n; ++i0)
        for (std::int64_t i1 = 0; i1 < (g.d == 2 ? n : 1); ++i1) {
            double r = detail::radius_at(g, i0, i1);
            acc += std::pow(1.0 + r * r, s) * std::norm(F.coeffs[g.offset(i0, i1)]);
        }
    return std::sqrt(acc * std::pow(g.dxi(), g.d));
}

// Product psi_Q f^ on the window box.
inline BoxSamples<cplx> window_product(const WindowSymbol& w, const SpectralSignal& F) {
    const GridSpec& g = F.grid;
    BoxSamples<cplx> out;
    out.box = w.samples.box;
    out.values.resize(out.box.count());
    for (std::int64_t i0 = out.box.lo[0]; i0 < out.box.hi[0]; ++i0)
        for (std::int64_t i1 = out.box.lo[1]; i1 < out.box.hi[1]; ++i1) {
            std::size_t l = out.box.local(i0, i1);
            out.values[l] = w.samples.values[l] * F.coeffs[g.offset(i0, i1)];
        }
    return out;
}

inline SpectralSignal multiplier_apply_spectral(const WindowSymbol& w, const SpectralSignal& F) {
    SpectralSignal out(F.grid);
    auto prod = window_product(w, F);
    for (std::int64_t i0 = prod.box.lo[0]; i0 < prod.box.hi[0]; ++i0)
        for (std::int64_t i1 = prod.box.lo[1]; i1 < prod.box.hi[1]; ++i1)
            out.coeffs[F.grid.offset(i0, i1)] = prod.values[prod.box.local(i0, i1)];
    return out;
}

// psi_Q(D) f, evaluated on the full grid.
inline Signal multiplier_apply(const WindowSymbol& w, const SpectralSignal& F) {
    return fft_inverse(multiplier_apply_spectral(w, F));
}

// Fraction of spectral energy outside B(0, radius).
inline double leaked_fraction(const SpectralSignal& F, double radius) {
    const GridSpec& g = F.grid;
    double out = 0, all = 0;
    const std::int64_t n = std::int64_t(g.n);
    for (std::int64_t i0 = 0; i0 < n; ++i0)
        for (std::int64_t i1 = 0; i1 < (g.d == 2 ? n : 1); ++i1) {
            double e = std::norm(F.coeffs[g.offset(i0, i1)]);
            all += e;
            if (detail::radius_at(g, i0, i1) > radius) out += e;
        }
    return all > 0 ? out / all : 0.0;
}

inline constexpr double kLeakageTolerance = 1e-6;

struct PieceEntry {
    PatchId id;
    double weight = 0.0;    // weight base raised to s
    double piece_lp = 0.0;  // ||psi_Q(D) f||_{L^p}
};

struct PieceNorms {
    SpaceParams params;
    std::vector<PieceEntry> entries;
    double leaked = 0.0;
};

// Piece norms ||psi_Q(D) f||_{L^p} for several exponents at once, and the
// weight bases (<xi_Q>, or 2^j on dyadic coverings).
struct PieceTable {
    std::vector<Exponent> ps;
    std::vector<std::vector<double>> lp;  // [patch][exponent]
    std::vector<double> weight_base;
    std::vector<PatchId> ids;
    double leaked = 0.0;
};

struct NormOptions {
    BandNormOptions band;
    // Replaces the designated points xi_Q for the weights when set.
    std::optional<std::vector<Vec2>> designated;
};

inline PieceTable piece_table(const SpectralSignal& F, const Bapu& B, const std::vector<Exponent>& ps,
                              const NormOptions& opt = {}) {
    if (!(F.grid == B.grid)) throw std::invalid_argument("piece_table: signal and partition grids differ");
    PieceTable t;
    t.ps = ps;
    t.leaked = leaked_fraction(F, B.covering.trunc_radius);
    if (t.leaked > kLeakageTolerance)
        throw LeakageError("spectral mass fraction " + std::to_string(t.leaked) +
                           " lies outside the certified region");
    const std::size_t np = B.size();
    t.lp.assign(np, std::vector<double>(ps.size(), 0.0));
    t.weight_base.resize(np);
    t.ids.resize(np);
    if (opt.designated && opt.designated->size() != np)
        throw std::invalid_argument("piece_table: designated point list has the wrong size");
    for (std::size_t i = 0; i < np; ++i) {
        t.ids[i] = B.covering.patches[i].id;
        t.weight_base[i] = opt.designated ? bracket((*opt.designated)[i], B.covering.d) : weight_base(B.covering, i);
    }
    parallel_for(np, [&](std::size_t i) { t.lp[i] = band_lp_norms(F.grid, window_product(B.windows[i], F), ps, opt.band); });
    return t;
}

inline std::size_t exponent_slot(const PieceTable& t, Exponent p) {
    for (std::size_t e = 0; e < t.ps.size(); ++e)
        if (t.ps[e] == p) return e;
    throw std::invalid_argument("piece table lacks exponent " + p.str());
}

// (sum_Q (w_Q^s ||psi_Q(D) f||_p)^q)^{1/q}, sup for q = inf.
inline double assemble_norm(const PieceTable& t, Exponent p, Exponent q, double s) {
    const std::size_t e = exponent_slot(t, p);
    double acc = 0;
    for (std::size_t i = 0; i < t.lp.size(); ++i) {
        double term = std::pow(t.weight_base[i], s) * t.lp[i][e];
        if (q.is_infinite())
            acc = std::max(acc, term);
        else if (term > 0)
            acc += std::pow(term, q.value());
    }
    return q.is_infinite() ? acc : std::pow(acc, 1.0 / q.value());
}

inline std::pair<double, PieceNorms> alpha_modulation_norm(const SpectralSignal& F, const Bapu& B,
                                                           const SpaceParams& params, const NormOptions& opt = {}) {
    params.validate();
    if (std::abs(params.alpha - B.covering.alpha) > 1e-12)
        throw std::invalid_argument("alpha_modulation_norm: partition was built for alpha = " +
                                    std::to_string(B.covering.alpha));
    PieceTable t = piece_table(F, B, {params.p}, opt);
    PieceNorms pn;
    pn.params = params;
    pn.leaked = t.leaked;
    for (std::size_t i = 0; i < t.lp.size(); ++i)
        pn.entries.push_back({t.ids[i], std::pow(t.weight_base[i], params.s), t.lp[i][0]});
    return {assemble_norm(t, params.p, params.q, params.s), std::move(pn)};
}

// Besov norm: the same assembly over the dyadic partition with weights 2^{js}.
inline double besov_norm(const SpectralSignal& F, const Bapu& dyadic, Exponent p, Exponent q, double s) {
    if (dyadic.covering.kind != CoveringKind::Dyadic) throw std::invalid_argument("besov_norm: needs a dyadic partition");
    return assemble_norm(piece_table(F, dyadic, {p}), p, q, s);
}

}  // namespace alphamod
