#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fft.hpp"
#include "grid.hpp"
#include "indices.hpp"

namespace alphamod {

struct BandNormOptions {
    int oversample = 16;
    bool refine_sup = true;
};

namespace detail {

inline std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

// Q(t) = sum_k b_k e^{i pi k . t / L}, the shifted baseband form of a
// band-limited function.
struct TrigPoly {
    int d;
    std::size_t w0, w1;
    double L;
    const std::vector<cplx>* b;

    cplx operator()(double t0, double t1) const {
        const cplx z0 = std::polar(1.0, kPi * t0 / L);
        if (d == 1) {
            cplx acc = 0;
            for (std::size_t k = w0; k-- > 0;) acc = acc * z0 + (*b)[k];
            return acc;
        }
        const cplx z1 = std::polar(1.0, kPi * t1 / L);
        cplx outer = 0;
        for (std::size_t k0 = w0; k0-- > 0;) {
            cplx inner = 0;
            const cplx* row = b->data() + k0 * w1;
            for (std::size_t k1 = w1; k1-- > 0;) inner = inner * z1 + row[k1];
            outer = outer * z0 + inner;
        }
        return outer;
    }
};

template <class F>
double golden_max(F&& f, double a, double b, int iters = 60) {
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), dd = a + gr * (b - a);
    double fc = f(c), fd = f(dd);
    for (int i = 0; i < iters; ++i) {
        if (fc > fd) {
            b = dd;
            dd = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = dd;
            fc = fd;
            dd = a + gr * (b - a);
            fd = f(dd);
        }
    }
    return std::max(fc, fd);
}

}  // namespace detail

// Lebesgue norms over the torus [-L, L)^d of
//   g(x) = (2 pi)^{-d/2} dxi^d sum_m v_m e^{i x . xi_m},
// the inverse transform of the spectral samples v. The function is a
// trigonometric polynomial, so it is evaluated on an oversampled grid sized
// by its bandwidth; p = inf is refined by local golden-section search.
inline std::vector<double> band_lp_norms(const GridSpec& g, const BoxSamples<cplx>& spec,
                                         const std::vector<Exponent>& ps, const BandNormOptions& opt = {}) {
    std::vector<double> out(ps.size(), 0.0);
    const int d = g.d;
    // Trim to the nonzero extent.
    IndexBox nz{{spec.box.hi[0], spec.box.hi[1]}, {spec.box.lo[0], spec.box.lo[1]}};
    for (std::int64_t i0 = spec.box.lo[0]; i0 < spec.box.hi[0]; ++i0)
        for (std::int64_t i1 = spec.box.lo[1]; i1 < spec.box.hi[1]; ++i1)
            if (spec.values[spec.box.local(i0, i1)] != cplx(0)) {
                nz.lo[0] = std::min(nz.lo[0], i0);
                nz.hi[0] = std::max(nz.hi[0], i0 + 1);
                nz.lo[1] = std::min(nz.lo[1], i1);
                nz.hi[1] = std::max(nz.hi[1], i1 + 1);
            }
    if (nz.empty()) return out;

    const std::size_t w0 = std::size_t(nz.width(0)), w1 = std::size_t(nz.width(1));
    auto pick = [&](std::size_t w) {
        if (w <= 1) return std::size_t(1);
        return std::min(detail::next_pow2(std::max<std::size_t>(std::size_t(opt.oversample) * w, 64)), 4 * g.n);
    };
    const std::size_t M0 = pick(w0), M1 = d == 2 ? pick(w1) : 1;

    std::vector<cplx> coef(w0 * w1);
    for (std::size_t k0 = 0; k0 < w0; ++k0)
        for (std::size_t k1 = 0; k1 < w1; ++k1) {
            double sgn = ((k0 + k1) & 1) ? -1.0 : 1.0;
            coef[k0 * w1 + k1] = sgn * spec.values[spec.box.local(nz.lo[0] + std::int64_t(k0), nz.lo[1] + std::int64_t(k1))];
        }
    std::vector<cplx> buf(M0 * M1, cplx(0));
    for (std::size_t k0 = 0; k0 < w0; ++k0)
        for (std::size_t k1 = 0; k1 < w1; ++k1) buf[k0 * M1 + k1] = coef[k0 * w1 + k1];
    fft::dft_inplace(buf, d, int(M0), int(M1), FFTW_BACKWARD);

    const double amp = std::pow(2.0 * kPi, -0.5 * d) * std::pow(g.dxi(), d);
    const double cell = (2.0 * g.L / double(M0)) * (d == 2 ? 2.0 * g.L / double(M1) : 1.0);
    std::vector<double> mag(buf.size());
    double smax = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        mag[i] = std::abs(buf[i]);
        smax = std::max(smax, mag[i]);
    }

    for (std::size_t e = 0; e < ps.size(); ++e) {
        const Exponent p = ps[e];
        if (p.is_infinite()) continue;
        const double pv = p.value();
        double acc = 0.0;
        if (p == Exponent::from_p(2))
            for (double m : mag) acc += m * m;
        else if (p == Exponent::from_p(1))
            for (double m : mag) acc += m;
        else
            for (double m : mag) acc += std::pow(m, pv);
        out[e] = amp * std::pow(acc * cell, 1.0 / pv);
    }

    bool need_sup = std::any_of(ps.begin(), ps.end(), [](Exponent p) { return p.is_infinite(); });
    if (!need_sup) return out;
    double sup = smax;
    if (opt.refine_sup && smax > 0) {
        detail::TrigPoly poly{d, w0, w1, g.L, &coef};
        const double h0 = 2.0 * g.L / double(M0), h1 = 2.0 * g.L / double(M1);
        // Candidate local maxima within 10% of the sampled maximum.
        std::vector<std::pair<double, std::size_t>> cand;
        for (std::size_t i0 = 0; i0 < M0; ++i0)
            for (std::size_t i1 = 0; i1 < M1; ++i1) {
                std::size_t i = i0 * M1 + i1;
                if (mag[i] < 0.9 * smax) continue;
                bool peak = true;
                for (int s0 = -1; s0 <= 1 && peak; ++s0)
                    for (int s1 = (d == 2 ? -1 : 0); s1 <= (d == 2 ? 1 : 0); ++s1) {
                        if (s0 == 0 && s1 == 0) continue;
                        std::size_t j0 = (i0 + M0 + std::size_t(s0 + int(M0))) % M0;
                        std::size_t j1 = d == 2 ? (i1 + M1 + std::size_t(s1 + int(M1))) % M1 : 0;
                        if (mag[j0 * M1 + j1] > mag[i]) {
                            peak = false;
                            break;
                        }
                    }
                if (peak) cand.emplace_back(-mag[i], i);
            }
        std::sort(cand.begin(), cand.end());
        if (cand.size() > 16) cand.resize(16);
        for (auto [negm, i] : cand) {
            double t0 = double(i / M1) * h0, t1 = double(i % M1) * h1;
            if (d == 1) {
                double v = detail::golden_max([&](double t) { return std::norm(poly(t, 0)); }, t0 - h0, t0 + h0);
                sup = std::max(sup, std::sqrt(v));
            } else {
                double best = std::norm(poly(t0, t1));
                for (int round = 0; round < 6; ++round) {
                    double a0 = t0 - h0, b0 = t0 + h0;
                    auto along0 = [&](double t) { return std::norm(poly(t, t1)); };
                    // Locate the argmax by a second golden pass on the narrowed bracket.
                    for (int it = 0; it < 50; ++it) {
                        double c = b0 - 0.618034 * (b0 - a0), e = a0 + 0.618034 * (b0 - a0);
                        if (along0(c) > along0(e)) b0 = e; else a0 = c;
                    }
                    t0 = 0.5 * (a0 + b0);
                    double a1 = t1 - h1, b1 = t1 + h1;
                    auto along1 = [&](double t) { return std::norm(poly(t0, t)); };
                    for (int it = 0; it < 50; ++it) {
                        double c = b1 - 0.618034 * (b1 - a1), e = a1 + 0.618034 * (b1 - a1);
                        if (along1(c) > along1(e)) b1 = e; else a1 = c;
                    }
                    t1 = 0.5 * (a1 + b1);
                    best = std::max(best, std::norm(poly(t0, t1)));
                }
                sup = std::max(sup, std::sqrt(best));
            }
        }
    }
    for (std::size_t e = 0; e < ps.size(); ++e)
        if (ps[e].is_infinite()) out[e] = amp * sup;
    return out;
}

}  // namespace alphamod
