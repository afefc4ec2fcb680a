#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signal.hpp"

namespace alphamod {

struct GaussianParams {
    double sigma = 1.0;
    Vec2 modulation{};  // spectral center
    double amplitude = 1.0;
};

struct BumpTrainParams {
    std::vector<Vec2> centers;
    std::vector<double> radii;
    std::vector<double> weights;
};

// Smooth band-limited noise: i.i.d. complex normal coefficients on the
// lattice spacing * Z^d inside B(0, radius - 9 width), each carried by a
// Gaussian of width `width` truncated below 1e-18. The spectrum is a fixed
// continuous function, so every grid samples the same signal.
struct RandomBandlimitedParams {
    double radius = 16.0;
    double spacing = 0.5;
    double width = 0.25;
};

enum class SignalKind { Gaussian, BumpTrain, RandomBandlimited };

inline Signal make_gaussian(const GridSpec& g, const GaussianParams& p) {
    g.validate();
    Signal f(g);
    for (std::size_t j0 = 0; j0 < g.n; ++j0)
        for (std::size_t j1 = 0; j1 < (g.d == 2 ? g.n : 1); ++j1) {
            double x0 = g.x(std::int64_t(j0)), x1 = g.d == 2 ? g.x(std::int64_t(j1)) : 0.0;
            double r2 = x0 * x0 + x1 * x1;
            double ph = x0 * p.modulation[0] + x1 * p.modulation[1];
            f.at(j0, j1) = p.amplitude * std::exp(-r2 / (2 * p.sigma * p.sigma)) * std::polar(1.0, ph);
        }
    return f;
}

// Closed-form spectrum of make_gaussian under the unitary convention.
inline cplx gaussian_spectrum(const GaussianParams& p, const Vec2& xi, int d) {
    double e0 = xi[0] - p.modulation[0], e1 = d == 2 ? xi[1] - p.modulation[1] : 0.0;
    return p.amplitude * std::pow(p.sigma, d) * std::exp(-p.sigma * p.sigma * (e0 * e0 + e1 * e1) / 2);
}

inline SpectralSignal bump_train_spectrum(const GridSpec& g, const BumpTrainParams& p) {
    g.validate();
    if (p.radii.size() != p.centers.size() || p.weights.size() != p.centers.size())
        throw std::invalid_argument("bump_train: centers, radii and weights must have equal length");
    SpectralSignal F(g);
    for (std::size_t b = 0; b < p.centers.size(); ++b) {
        const Vec2 c = p.centers[b];
        const double rho = p.radii[b];
        Vec2 lo{c[0] - rho, c[1] - rho}, hi{c[0] + rho, c[1] + rho};
        IndexBox box = index_box(g, lo, hi);
        for (std::int64_t i0 = box.lo[0]; i0 < box.hi[0]; ++i0)
            for (std::int64_t i1 = box.lo[1]; i1 < box.hi[1]; ++i1) {
                Vec2 x = detail::point_at(g, i0, i1);
                double u0 = (x[0] - c[0]) / rho, u1 = g.d == 2 ? (x[1] - c[1]) / rho : 0.0;
                F.coeffs[g.offset(i0, i1)] += p.weights[b] * template_bump(u0 * u0 + u1 * u1);
            }
    }
    return F;
}

inline SpectralSignal random_bandlimited_spectrum(const GridSpec& g, std::uint64_t seed,
                                                  const RandomBandlimitedParams& p) {
    g.validate();
    const int d = g.d;
    const double cut = 9.1 * p.width;  // exp(-u^2/(2 w^2)) < 1e-18 beyond
    const double inner = p.radius - cut;
    if (!(inner > 0)) throw std::invalid_argument("random_bandlimited: radius too small for the carrier width");
    Rng rng(seed);
    const auto m = std::int64_t(std::floor(inner / p.spacing));
    SpectralSignal F(g);
    for (std::int64_t a = -m; a <= m; ++a)
        for (std::int64_t b = (d == 2 ? -m : 0); b <= (d == 2 ? m : 0); ++b) {
            Vec2 nu{double(a) * p.spacing, double(b) * p.spacing};
            double re = rng.normal(), im = rng.normal();
            if (norm(nu, d) > inner) continue;
            cplx c(re, im);
            IndexBox box = index_box(g, {nu[0] - cut, nu[1] - cut}, {nu[0] + cut, nu[1] + cut});
            for (std::int64_t i0 = box.lo[0]; i0 < box.hi[0]; ++i0)
                for (std::int64_t i1 = box.lo[1]; i1 < box.hi[1]; ++i1) {
                    Vec2 x = detail::point_at(g, i0, i1);
                    double r2 = (x[0] - nu[0]) * (x[0] - nu[0]) + (d == 2 ? (x[1] - nu[1]) * (x[1] - nu[1]) : 0.0);
                    if (r2 > cut * cut) continue;
                    F.coeffs[g.offset(i0, i1)] += c * std::exp(-r2 / (2 * p.width * p.width));
                }
        }
    return F;
}

inline Signal make_test_signal(SignalKind kind, const GridSpec& g, std::uint64_t seed = 0,
                               const GaussianParams& gp = {}, const BumpTrainParams& bp = {},
                               const RandomBandlimitedParams& rp = {}) {
    switch (kind) {
        case SignalKind::Gaussian: return make_gaussian(g, gp);
        case SignalKind::BumpTrain: return fft_inverse(bump_train_spectrum(g, bp));
        case SignalKind::RandomBandlimited: return fft_inverse(random_bandlimited_spectrum(g, seed, rp));
    }
    throw std::invalid_argument("make_test_signal: unknown kind");
}

inline const char* signal_kind_name(SignalKind k) {
    switch (k) {
        case SignalKind::Gaussian: return "gaussian";
        case SignalKind::BumpTrain: return "bump_train";
        case SignalKind::RandomBandlimited: return "random_bandlimited";
    }
    return "?";
}

}  // namespace alphamod
