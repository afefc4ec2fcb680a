#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "band.hpp"
#include "covering.hpp"
#include "grid.hpp"

namespace alphamod {

enum class WindowForm { NormalizedBump, Plateau, DyadicDilate };

inline const char* form_name(WindowForm f) {
    switch (f) {
        case WindowForm::NormalizedBump: return "normalized-bump";
        case WindowForm::Plateau: return "plateau";
        case WindowForm::DyadicDilate: return "dyadic-dilate";
    }
    return "?";
}

// A window psi_Q sampled on the spectral grid. Values are real.
struct WindowSymbol {
    PatchId patch_id;
    WindowForm form = WindowForm::NormalizedBump;
    BoxSamples<double> samples;
};

struct Bapu {
    Covering covering;
    GridSpec grid;
    std::vector<WindowSymbol> windows;  // aligned with covering.patches
    std::vector<int> plateau_ids;
    double plateau_r = 0.0;

    std::size_t size() const { return windows.size(); }
};

// Radial cutoff equal to 1 on |u| <= 1/2 and vanishing for |u| >= 1.
inline double dyadic_base(double r) { return smooth_step(2.0 - 2.0 * r); }

inline double dyadic_window(int j, double r) {
    if (j == 0) return dyadic_base(r);
    return dyadic_base(std::ldexp(r, -j)) - dyadic_base(std::ldexp(r, 1 - j));
}

// Equal to 1 on |u| <= rp/4 and supported in |u| <= rp/2.
inline double plateau_cutoff(double u, double rp) { return smooth_step((rp / 2.0 - u) / (rp / 4.0)); }

namespace detail {

inline double radius_at(const GridSpec& g, std::int64_t i0, std::int64_t i1) {
    double a = g.xi(i0);
    double b = g.d == 2 ? g.xi(i1) : 0.0;
    return std::hypot(a, b);
}

inline Vec2 point_at(const GridSpec& g, std::int64_t i0, std::int64_t i1) {
    return {g.xi(i0), g.d == 2 ? g.xi(i1) : 0.0};
}

template <class F>
BoxSamples<double> sample_on(const GridSpec& g, const IndexBox& box, F&& f) {
    BoxSamples<double> s;
    s.box = box;
    s.values.assign(box.count(), 0.0);
    for (std::int64_t i0 = box.lo[0]; i0 < box.hi[0]; ++i0)
        for (std::int64_t i1 = box.lo[1]; i1 < box.hi[1]; ++i1) s.values[box.local(i0, i1)] = f(point_at(g, i0, i1));
    return s;
}

inline IndexBox patch_box(const GridSpec& g, const FrequencyPatch& P, int d) {
    Box2 b = bounding_box(P, d);
    return index_box(g, b.lo, b.hi);
}

}  // namespace detail

inline void check_grid_for_covering(const GridSpec& g, const Covering& C) {
    g.validate();
    if (g.d != C.d) throw std::invalid_argument("grid and covering dimensions differ");
    if (!(g.nyquist() > C.trunc_radius))
        throw std::invalid_argument("grid Nyquist radius " + std::to_string(g.nyquist()) +
                                    " does not exceed trunc_radius " + std::to_string(C.trunc_radius));
}

// Windows subordinate to the covering. Dyadic coverings use the dilation
// family phi_j(xi) = phi(2^{1-j} xi); all others normalize template bumps
// placed on the inscribed balls.
inline Bapu build_bapu(const Covering& C, const GridSpec& g) {
    check_grid_for_covering(g, C);
    Bapu B;
    B.covering = C;
    B.grid = g;
    const int d = C.d;
    const std::size_t np = C.size();
    B.windows.resize(np);

    if (C.kind == CoveringKind::Dyadic) {
        for (std::size_t i = 0; i < np; ++i) {
            const auto& P = C.patches[i];
            int j = P.id.index;
            B.windows[i].patch_id = P.id;
            B.windows[i].form = WindowForm::DyadicDilate;
            B.windows[i].samples = detail::sample_on(g, detail::patch_box(g, P, d),
                                                     [&](const Vec2& x) { return dyadic_window(j, norm(x, d)); });
        }
        return B;
    }

    std::vector<double> total(g.total(), 0.0);
    for (std::size_t i = 0; i < np; ++i) {
        const auto& P = C.patches[i];
        const Vec2 c = P.shape == Shape::Ball0 ? Vec2{0, 0} : P.center;
        const double rho = inner_outer_radius(P, d).first;
        auto& w = B.windows[i];
        w.patch_id = P.id;
        w.form = WindowForm::NormalizedBump;
        w.samples = detail::sample_on(g, detail::patch_box(g, P, d), [&](const Vec2& x) {
            double u0 = (x[0] - c[0]) / rho, u1 = d == 2 ? (x[1] - c[1]) / rho : 0.0;
            return template_bump(u0 * u0 + u1 * u1);
        });
        const auto& box = w.samples.box;
        for (std::int64_t i0 = box.lo[0]; i0 < box.hi[0]; ++i0)
            for (std::int64_t i1 = box.lo[1]; i1 < box.hi[1]; ++i1)
                total[g.offset(i0, i1)] += w.samples.values[box.local(i0, i1)];
    }
    const std::int64_t n = std::int64_t(g.n);
    for (std::int64_t i0 = 0; i0 < n; ++i0)
        for (std::int64_t i1 = 0; i1 < (d == 2 ? n : 1); ++i1)
            if (total[g.offset(i0, i1)] <= 0.0 && detail::radius_at(g, i0, i1) <= C.trunc_radius)
                throw CertificationError("partition denominator vanishes at xi = " +
                                         std::to_string(g.xi(i0)) + " inside the certified region");
    for (auto& w : B.windows) {
        const auto& box = w.samples.box;
        for (std::int64_t i0 = box.lo[0]; i0 < box.hi[0]; ++i0)
            for (std::int64_t i1 = box.lo[1]; i1 < box.hi[1]; ++i1) {
                double& v = w.samples.values[box.local(i0, i1)];
                double t = total[g.offset(i0, i1)];
                v = t > 0 ? v / t : 0.0;
            }
    }
    return B;
}

// Adjoins plateau windows phi_j = phi(<xi_j>^{-alpha}(xi - xi_j)), equal to 1
// on B(xi_j, rp <xi_j>^alpha / 4), and multiplies the existing windows by
// prod_j (1 - phi_j).
inline Bapu adjoin_plateau(const Bapu& base, const std::vector<Vec2>& centers, double rp) {
    if (!(rp > 0)) throw std::invalid_argument("adjoin_plateau: plateau radius must be positive");
    const int d = base.covering.d;
    const double alpha = base.covering.alpha;
    const GridSpec& g = base.grid;
    std::vector<double> R(centers.size());
    for (std::size_t j = 0; j < centers.size(); ++j) {
        R[j] = rp * std::pow(bracket(centers[j], d), alpha) / 2.0;
        if (norm(centers[j], d) + R[j] > base.covering.trunc_radius)
            throw std::invalid_argument("adjoin_plateau: plateau ball " + std::to_string(j) +
                                        " leaves the certified region");
    }
    for (std::size_t j = 0; j < centers.size(); ++j)
        for (std::size_t k = j + 1; k < centers.size(); ++k)
            if (dist(centers[j], centers[k], d) < (R[j] + R[k]) * (1 - 1e-12))
                throw std::invalid_argument("adjoin_plateau: plateau balls " + std::to_string(j) + " and " +
                                            std::to_string(k) + " overlap");
    if (!base.plateau_ids.empty() && base.plateau_r != rp)
        throw std::invalid_argument("adjoin_plateau: plateau radius differs from the earlier adjunction");

    Bapu B = base;
    B.plateau_r = rp;
    std::vector<double> keep(g.total(), 1.0);
    std::vector<WindowSymbol> added;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const Vec2 c = centers[j];
        const double scale = std::pow(bracket(c, d), -alpha);
        FrequencyPatch P;
        P.shape = Shape::Ball;
        P.center = c;
        P.radius = R[j];
        P.xi = c;
        P.id = PatchId::running(int(B.covering.size()));
        WindowSymbol w;
        w.patch_id = P.id;
        w.form = WindowForm::Plateau;
        w.samples = detail::sample_on(g, detail::patch_box(g, P, d),
                                      [&](const Vec2& x) { return plateau_cutoff(dist(x, c, d) * scale, rp); });
        const auto& box = w.samples.box;
        for (std::int64_t i0 = box.lo[0]; i0 < box.hi[0]; ++i0)
            for (std::int64_t i1 = box.lo[1]; i1 < box.hi[1]; ++i1)
                keep[g.offset(i0, i1)] *= 1.0 - w.samples.values[box.local(i0, i1)];
        B.plateau_ids.push_back(int(B.covering.size()));
        B.covering.patches.push_back(P);
        added.push_back(std::move(w));
    }
    for (auto& w : B.windows) {
        const auto& box = w.samples.box;
        for (std::int64_t i0 = box.lo[0]; i0 < box.hi[0]; ++i0)
            for (std::int64_t i1 = box.lo[1]; i1 < box.hi[1]; ++i1)
                w.samples.values[box.local(i0, i1)] *= keep[g.offset(i0, i1)];
    }
    for (auto& w : added) B.windows.push_back(std::move(w));
    auto rep = certify_alpha_covering(B.covering);
    attach_certificate(B.covering, rep);
    return B;
}

struct PartitionReport {
    double sum_error = 0.0;       // max |sum psi - 1| inside the certified region
    double square_sum_min = 0.0;  // min sum psi^2 inside the certified region
    double value_min = 0.0;
    double value_max = 0.0;
    bool support_ok = true;
    std::size_t samples = 0;
};

inline PartitionReport certify_partition(const Bapu& B) {
    const GridSpec& g = B.grid;
    const int d = g.d;
    std::vector<double> sum(g.total(), 0.0), sq(g.total(), 0.0);
    PartitionReport rep;
    rep.value_min = HUGE_VAL;
    rep.value_max = -HUGE_VAL;
    for (std::size_t i = 0; i < B.size(); ++i) {
        const auto& w = B.windows[i];
        const auto& P = B.covering.patches[i];
        const auto& box = w.samples.box;
        for (std::int64_t i0 = box.lo[0]; i0 < box.hi[0]; ++i0)
            for (std::int64_t i1 = box.lo[1]; i1 < box.hi[1]; ++i1) {
                double v = w.samples.values[box.local(i0, i1)];
                rep.value_min = std::min(rep.value_min, v);
                rep.value_max = std::max(rep.value_max, v);
                if (v != 0.0 && !contains(P, detail::point_at(g, i0, i1), d)) rep.support_ok = false;
                sum[g.offset(i0, i1)] += v;
                sq[g.offset(i0, i1)] += v * v;
            }
    }
    rep.square_sum_min = HUGE_VAL;
    const std::int64_t n = std::int64_t(g.n);
    for (std::int64_t i0 = 0; i0 < n; ++i0)
        for (std::int64_t i1 = 0; i1 < (d == 2 ? n : 1); ++i1) {
            if (detail::radius_at(g, i0, i1) > B.covering.trunc_radius) continue;
            ++rep.samples;
            rep.sum_error = std::max(rep.sum_error, std::abs(sum[g.offset(i0, i1)] - 1.0));
            rep.square_sum_min = std::min(rep.square_sum_min, sq[g.offset(i0, i1)]);
        }
    return rep;
}

struct ScalingReport {
    std::string label;
    double max_quantity = 0.0;
    double min_quantity = 0.0;
    double slope = 0.0;
    bool passed = false;
    std::size_t windows_used = 0;
};

// Windows whose patch closure lies inside B(0, T); these never see the
// truncation of the covering.
inline std::vector<std::size_t> interior_windows(const Bapu& B) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < B.size(); ++i) {
        if (abs_range(B.covering.patches[i], B.covering.d).second > B.covering.trunc_radius) continue;
        const auto& v = B.windows[i].samples.values;
        if (std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; })) out.push_back(i);
    }
    return out;
}

namespace detail {

// Fourth-order centered stencils for derivatives of order 1..3.
inline std::vector<double> fd_stencil(int order) {
    switch (order) {
        case 0: return {0, 0, 0, 1, 0, 0, 0};
        case 1: return {0, 1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12, 0};
        case 2: return {0, -1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0};
        case 3: return {1.0 / 8, -1.0, 13.0 / 8, 0, -13.0 / 8, 1.0, -1.0 / 8};
    }
    throw std::invalid_argument("fd_stencil: order must be <= 3");
}

// max |d^a/dxi0^a d^b/dxi1^b psi| with zero padding outside the box.
inline double max_derivative(const BoxSamples<double>& s, int d, double h, int a, int b) {
    const std::int64_t m = 3;
    const std::int64_t w0 = s.box.width(0) + 2 * m, w1 = d == 2 ? s.box.width(1) + 2 * m : 1;
    std::vector<double> buf(std::size_t(w0 * w1), 0.0);
    for (std::int64_t i0 = 0; i0 < s.box.width(0); ++i0)
        for (std::int64_t i1 = 0; i1 < s.box.width(1); ++i1)
            buf[std::size_t((i0 + m) * w1 + (d == 2 ? i1 + m : 0))] =
                s.values[s.box.local(s.box.lo[0] + i0, s.box.lo[1] + i1)];
    auto apply = [&](std::vector<double>& in, int axis, int order) {
        auto st = fd_stencil(order);
        std::vector<double> out(in.size(), 0.0);
        for (std::int64_t i0 = 0; i0 < w0; ++i0)
            for (std::int64_t i1 = 0; i1 < w1; ++i1) {
                double acc = 0;
                for (int k = -3; k <= 3; ++k) {
                    std::int64_t j0 = axis == 0 ? i0 + k : i0, j1 = axis == 1 ? i1 + k : i1;
                    if (j0 < 0 || j0 >= w0 || j1 < 0 || j1 >= w1) continue;
                    acc += st[std::size_t(k + 3)] * in[std::size_t(j0 * w1 + j1)];
                }
                out[std::size_t(i0 * w1 + i1)] = acc / std::pow(h, order);
            }
        in.swap(out);
    };
    if (a > 0) apply(buf, 0, a);
    if (b > 0) apply(buf, 1, b);
    double mx = 0;
    for (double v : buf) mx = std::max(mx, std::abs(v));
    return mx;
}

// Slopes are fitted on windows with <xi_i> >= kSlopeFitFrom.
inline constexpr double kSlopeFitFrom = 2.0;

inline ScalingReport scaling_report(std::string label, const std::vector<double>& xi_bracket,
                                    const std::vector<double>& q, double max_slope) {
    ScalingReport r;
    r.label = std::move(label);
    r.windows_used = q.size();
    r.min_quantity = HUGE_VAL;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < q.size(); ++i) {
        r.max_quantity = std::max(r.max_quantity, q[i]);
        r.min_quantity = std::min(r.min_quantity, q[i]);
        if (q[i] > 0 && xi_bracket[i] >= kSlopeFitFrom) {
            lx.push_back(std::log(xi_bracket[i]));
            ly.push_back(std::log(q[i]));
        }
    }
    if (q.empty()) r.min_quantity = 0;
    r.slope = regression_slope(lx, ly);
    r.passed = r.slope <= max_slope && std::isfinite(r.max_quantity);
    return r;
}

}  // namespace detail

// For each order |beta| <= max_order: <xi_i>^{alpha |beta|} max_beta ||d^beta psi_i||_inf
// over interior windows, with the log-log slope against <xi_i>.
inline std::vector<ScalingReport> certify_derivative_scaling(const Bapu& B, int max_order = 3,
                                                             double max_slope = 0.05) {
    const int d = B.covering.d;
    const double alpha = B.covering.alpha;
    const double h = B.grid.dxi();
    auto ids = interior_windows(B);
    std::vector<ScalingReport> out;
    for (int order = 0; order <= max_order; ++order) {
        std::vector<double> q(ids.size()), xb(ids.size());
        parallel_for(ids.size(), [&](std::size_t t) {
            std::size_t i = ids[t];
            double m = 0;
            for (int a = 0; a <= order; ++a) {
                int b = order - a;
                if (d == 1 && b > 0) continue;
                m = std::max(m, detail::max_derivative(B.windows[i].samples, d, h, a, b));
            }
            xb[t] = bracket(B.covering.patches[i].xi, d);
            q[t] = std::pow(xb[t], alpha * order) * m;
        });
        out.push_back(detail::scaling_report("order " + std::to_string(order), xb, q, max_slope));
    }
    return out;
}

// <xi_i>^{-d alpha/p'} ||F psi_i||_{L^p} over interior windows.
inline ScalingReport certify_fourier_growth(const Bapu& B, Exponent p, double max_slope = 0.05) {
    const int d = B.covering.d;
    const double alpha = B.covering.alpha;
    const double pc = p.conjugate().recip_value();
    auto ids = interior_windows(B);
    std::vector<double> q(ids.size()), xb(ids.size());
    parallel_for(ids.size(), [&](std::size_t t) {
        std::size_t i = ids[t];
        const auto& s = B.windows[i].samples;
        BoxSamples<cplx> spec{s.box, std::vector<cplx>(s.values.begin(), s.values.end())};
        double nrm = band_lp_norms(B.grid, spec, {p})[0];
        xb[t] = bracket(B.covering.patches[i].xi, d);
        q[t] = std::pow(xb[t], -d * alpha * pc) * nrm;
    });
    return detail::scaling_report("fourier L^" + p.str(), xb, q, max_slope);
}

// ||F psi_i||_{L^2} through Parseval on the spectral samples.
inline double window_l2_parseval(const Bapu& B, std::size_t i) {
    double acc = 0;
    for (double v : B.windows[i].samples.values) acc += v * v;
    return std::sqrt(acc * std::pow(B.grid.dxi(), B.grid.d));
}

}  // namespace alphamod
