#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bapu.hpp"
#include "covering.hpp"
#include "indices.hpp"
#include "io.hpp"
#include "signal.hpp"
#include "test_signals.hpp"

namespace alphamod {

enum class Direction { Upper, Lower };

inline const char* direction_name(Direction d) { return d == Direction::Upper ? "upper" : "lower"; }

// Upper: ||f||_{alpha1,s} <= C ||f||_{alpha2, s + shift} with shift from theta1.
// Lower: ||f||_{alpha2, s + shift} <= C ||f||_{alpha1,s} with shift from theta2.
struct EmbeddingCase {
    int d = 1;
    double alpha1 = 0.0;
    double alpha2 = 1.0;
    Exponent p;
    Exponent q;
    double s = 0.0;
    Direction direction = Direction::Upper;

    void validate() const {
        if (d != 1 && d != 2) throw std::invalid_argument("embedding: d must be 1 or 2");
        if (!(0.0 <= alpha1 && alpha1 <= alpha2 && alpha2 <= 1.0))
            throw std::invalid_argument("embedding: requires 0 <= alpha1 <= alpha2 <= 1");
        if (!std::isfinite(s)) throw std::invalid_argument("embedding: s must be finite");
    }
};

inline double embedding_shift(const EmbeddingCase& c) {
    Rational th = c.direction == Direction::Upper ? theta1(c.p, c.q) : theta2(c.p, c.q);
    return weight_shift(c.d, c.alpha1, c.alpha2, th);
}

// The upper shift at (p, q) is the negated lower shift at (p', q').
inline bool duality_holds(Exponent p, Exponent q) {
    return theta1(p, q) == -theta2(p.conjugate(), q.conjugate()) && nu1(p, q) == -nu2(p.conjugate(), q.conjugate());
}

// alpha = 1 uses the dyadic partition, anything below a certified ball lattice.
inline Bapu scale_bapu(int d, double alpha, double trunc_radius, const GridSpec& g) {
    if (alpha == 1.0) return build_bapu(build_dyadic_covering(d, trunc_radius), g);
    return build_bapu(build_ball_covering(d, alpha, std::nullopt, trunc_radius), g);
}

// Grid-independent spectra: band-limited noise, modulated Gaussians and bump trains,
// all concentrated in B(0, radius).
inline std::vector<SpectralSignal> embedding_signals(const GridSpec& g, std::uint64_t seed, int count, double radius) {
    if (!(radius > 12.0)) throw std::invalid_argument("embedding_signals: radius must exceed 12");
    std::vector<SpectralSignal> out;
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        const std::uint64_t sub = rng.next();
        const double u = rng.uniform(), v = rng.uniform();
        switch (i % 3) {
            case 0: out.push_back(random_bandlimited_spectrum(g, sub, {radius, 0.5, 0.25})); break;
            case 1: {
                GaussianParams gp;
                gp.sigma = 1.0;
                const double reach = (radius - 9.0) / (g.d == 2 ? std::sqrt(2.0) : 1.0);
                gp.modulation = {(2 * u - 1) * reach, g.d == 2 ? (2 * v - 1) * reach : 0.0};
                SpectralSignal F(g);
                for (std::int64_t i0 = 0; i0 < std::int64_t(g.n); ++i0)
                    for (std::int64_t i1 = 0; i1 < (g.d == 2 ? std::int64_t(g.n) : 1); ++i1)
                        F.coeffs[g.offset(i0, i1)] = gaussian_spectrum(gp, detail::point_at(g, i0, i1), g.d);
                out.push_back(std::move(F));
                break;
            }
            default: {
                BumpTrainParams bp;
                Rng local(sub);
                for (int b = 0; b < 4; ++b) {
                    double rho = 0.5 + 2.0 * local.uniform();
                    double reach = (radius - rho) / (g.d == 2 ? std::sqrt(2.0) : 1.0);
                    bp.centers.push_back({(2 * local.uniform() - 1) * reach, g.d == 2 ? (2 * local.uniform() - 1) * reach : 0.0});
                    bp.radii.push_back(rho);
                    bp.weights.push_back(0.2 + local.uniform());
                }
                out.push_back(bump_train_spectrum(g, bp));
            }
        }
    }
    return out;
}

struct EmbeddingData {
    std::vector<PieceTable> t1, t2;  // per signal, on the alpha1 and alpha2 partitions
};

inline EmbeddingData embedding_tables(const std::vector<SpectralSignal>& signals, const Bapu& b1, const Bapu& b2,
                                      const std::vector<Exponent>& ps) {
    EmbeddingData D;
    for (const auto& S : signals) {
        D.t1.push_back(piece_table(S, b1, ps));
        D.t2.push_back(piece_table(S, b2, ps));
    }
    return D;
}

struct EmbeddingResult {
    EmbeddingCase c;
    double shift = 0.0;
    double worst_ratio = 0.0;  // max over signals of the bounded side
    double min_ratio = HUGE_VAL;
    int signals_used = 0;
};

inline EmbeddingResult evaluate_embedding(const EmbeddingCase& c, const EmbeddingData& D) {
    c.validate();
    if (!duality_holds(c.p, c.q)) throw std::logic_error("index duality fails at p=" + c.p.str() + " q=" + c.q.str());
    EmbeddingResult R;
    R.c = c;
    R.shift = embedding_shift(c);
    for (std::size_t i = 0; i < D.t1.size(); ++i) {
        double n1 = assemble_norm(D.t1[i], c.p, c.q, c.s);
        double n2 = assemble_norm(D.t2[i], c.p, c.q, c.s + R.shift);
        if (!(n1 > 0 && n2 > 0)) continue;
        double ratio = c.direction == Direction::Upper ? n1 / n2 : n2 / n1;
        R.worst_ratio = std::max(R.worst_ratio, ratio);
        R.min_ratio = std::min(R.min_ratio, ratio);
        ++R.signals_used;
    }
    return R;
}

inline EmbeddingResult verify_embedding(const EmbeddingCase& c, const std::vector<SpectralSignal>& signals,
                                        const Bapu& b1, const Bapu& b2) {
    if (std::abs(b1.covering.alpha - c.alpha1) > 1e-12 || std::abs(b2.covering.alpha - c.alpha2) > 1e-12)
        throw std::invalid_argument("verify_embedding: partitions do not match alpha1, alpha2");
    return evaluate_embedding(c, embedding_tables(signals, b1, b2, {c.p}));
}

inline double relative_gap(double a, double b) { return std::abs(a / b - 1.0); }

struct EndpointRow {
    Exponent p, q;
    double stated_shift = 0.0;  // shift of the endpoint estimate
    double index_shift = 0.0;   // d (alpha2 - alpha1) theta2(p, q)
    bool consistent = false;
    EmbeddingResult result;
};

// The five endpoint embeddings M_{alpha1,s} into M_{alpha2, s + shift}.
inline std::vector<std::pair<std::pair<Exponent, Exponent>, double>> endpoint_shifts(int d, double a1, double a2) {
    const double g = double(d) * (a2 - a1);
    const Exponent one = Exponent::from_p(1), two = Exponent::from_p(2), inf = Exponent::infinity();
    return {{{two, inf}, -g / 2}, {{one, one}, 0.0}, {{one, inf}, -g}, {{inf, one}, 0.0}, {{inf, inf}, -g}};
}

inline std::vector<EndpointRow> verify_endpoints(int d, double a1, double a2, double s,
                                                 const std::vector<SpectralSignal>& signals, const Bapu& b1,
                                                 const Bapu& b2) {
    std::vector<Exponent> ps{Exponent::from_p(1), Exponent::from_p(2), Exponent::infinity()};
    EmbeddingData D = embedding_tables(signals, b1, b2, ps);
    std::vector<EndpointRow> out;
    for (const auto& [pq, shift] : endpoint_shifts(d, a1, a2)) {
        EndpointRow row;
        row.p = pq.first;
        row.q = pq.second;
        row.stated_shift = shift;
        row.index_shift = weight_shift(d, a1, a2, theta2(row.p, row.q));
        row.consistent = std::abs(row.stated_shift - row.index_shift) <= 1e-15;
        EmbeddingCase c{d, a1, a2, row.p, row.q, s, Direction::Lower};
        row.result = evaluate_embedding(c, D);
        out.push_back(row);
    }
    return out;
}

struct CorollaryRegion {
    bool sharp_upper_applies = false;  // 1/p <= max(1/2, 1/q)
    bool sharp_lower_applies = false;  // 1/p >= min(1/2, 1/q)
};

inline CorollaryRegion corollary_region_check(Exponent p, Exponent q) {
    const Rational half(1, 2);
    return {p.recip() <= max(half, q.recip()), p.recip() >= min(half, q.recip())};
}

// ---------------------------------------------------------------------------
// Extremal families

enum class BumpMode { Scaled, Fixed };

inline const char* bump_mode_name(BumpMode m) { return m == BumpMode::Scaled ? "scaled" : "fixed"; }

struct SharpnessConfig {
    int d = 1;
    double alpha1 = 0.0;
    double alpha2 = 1.0;
    Exponent p;
    Exponent q;
    double s = 0.0;
    double eps = 0.25;
    std::optional<BumpMode> mode;  // chosen from the exponents when empty
    double rp = 0.1;               // plateau parameter: psi_i = 1 on B(xi_i, rp <xi_i>^alpha2 / 4)
    double first_center = 40.0;
    double fixed_radius = 1.0;
    std::vector<int> N_list{4, 8, 16, 32, 64};
    std::size_t n = std::size_t(1) << 19;
    double nyquist_margin = 1.1;
    double max_center = 1e6;

    void validate() const {
        EmbeddingCase{d, alpha1, alpha2, p, q, s, Direction::Lower}.validate();
        if (d != 1) throw std::invalid_argument("sharpness: families are laid out along one axis, d = 1 only");
        if (!(eps >= 0)) throw std::invalid_argument("sharpness: eps must be nonnegative");
        if (!(rp > 0 && rp < 1)) throw std::invalid_argument("sharpness: rp must lie in (0, 1)");
        if (N_list.empty() || *std::min_element(N_list.begin(), N_list.end()) < 1)
            throw std::invalid_argument("sharpness: N values must be positive");
        if (!(nyquist_margin > 1)) throw std::invalid_argument("sharpness: nyquist margin must exceed 1");
    }
};

// 1/q - 1/p' decides which family is extremal: scaled bumps when it is negative.
inline BumpMode resolved_mode(const SharpnessConfig& c) {
    if (c.mode) return *c.mode;
    Rational gap = c.q.recip() - c.p.conjugate().recip();
    return gap < Rational(0) ? BumpMode::Scaled : BumpMode::Fixed;
}

// Largest t allowed by the two necessary conditions: s + d(a2 - a1) min(0, 1/q - 1/p').
inline double sharpness_threshold(const SharpnessConfig& c) {
    Rational gap = min(Rational(0), c.q.recip() - c.p.conjugate().recip());
    return c.s + double(c.d) * (c.alpha2 - c.alpha1) * gap.to_double();
}

inline double plateau_radius(const SharpnessConfig& c, double center) {
    return c.rp * std::pow(bracket(center), c.alpha2) / 2.0;
}

// Greedy disjoint plateau centers along e1. Scaled families with q < inf also
// need <xi_i> >= <i>^{2/(eps q)}.
inline std::vector<double> plateau_centers(const SharpnessConfig& c, int count) {
    const BumpMode mode = resolved_mode(c);
    std::vector<double> out;
    double edge = -HUGE_VAL;
    for (int i = 1; i <= count; ++i) {
        double x = c.first_center;
        if (i > 1) {
            double lo = out.back(), hi = 2 * edge + 16;
            while (hi - plateau_radius(c, hi) < edge) hi *= 2;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                (mid - plateau_radius(c, mid) >= edge ? hi : lo) = mid;
            }
            x = hi;
        }
        if (mode == BumpMode::Scaled && !c.q.is_infinite()) {
            double need = std::pow(bracket(double(i)), 2.0 / (c.eps * c.q.value()));
            if (bracket(x) < need) x = std::sqrt(need * need - 1.0);
        }
        if (mode == BumpMode::Fixed) x = std::ceil(x);
        if (x + plateau_radius(c, x) > c.max_center)
            throw std::invalid_argument("sharpness: only " + std::to_string(i - 1) + " disjoint plateaus fit below " +
                                        io::fmt(c.max_center) + " (requested " + std::to_string(count) + ")");
        out.push_back(x);
        edge = x + plateau_radius(c, x);
    }
    return out;
}

struct ExtremalFamily {
    std::vector<Vec2> centers;
    std::vector<double> weights;  // t_i
    std::vector<double> radii;    // bump support radii
    BumpMode mode = BumpMode::Fixed;
    double eps = 0.0;
};

// Bump equal to 1 on |u| <= rho/2 and supported in |u| <= rho.
inline double family_bump(double u, double rho) { return smooth_step((rho - std::abs(u)) / (rho / 2.0)); }

inline ExtremalFamily extremal_family(const SharpnessConfig& c, const std::vector<double>& centers, int N) {
    c.validate();
    if (N < 1 || std::size_t(N) > centers.size()) throw std::invalid_argument("extremal: N exceeds the available centers");
    ExtremalFamily fam;
    fam.mode = resolved_mode(c);
    fam.eps = c.eps;
    const double da = double(c.d) * (c.alpha2 - c.alpha1);
    const double ipc = c.p.conjugate().recip_value();
    for (int i = 1; i <= N; ++i) {
        double x = centers[std::size_t(i - 1)];
        double bx = bracket(x);
        fam.centers.push_back({x, 0.0});
        double plateau_one = c.rp * std::pow(bx, c.alpha2) / 4.0;
        if (fam.mode == BumpMode::Fixed) {
            if (c.fixed_radius > plateau_one)
                throw std::invalid_argument("extremal: fixed bump radius exceeds the plateau at center " + io::fmt(x));
            fam.radii.push_back(c.fixed_radius);
            fam.weights.push_back(1.0);
        } else {
            fam.radii.push_back(plateau_one);
            double t = c.q.is_infinite()
                           ? std::pow(bx, -c.s - c.d * c.alpha1 * ipc)
                           : std::pow(bracket(double(i)), -2.0 / c.q.value()) *
                                 std::pow(bx, -c.s - da / c.q.value() - c.d * c.alpha1 * ipc);
            fam.weights.push_back(t);
        }
    }
    return fam;
}

// f^ = sum t_i theta_i; throws if two bump supports share a grid sample.
inline SpectralSignal family_spectrum(const ExtremalFamily& fam, const GridSpec& g) {
    SpectralSignal F(g);
    std::vector<unsigned char> owner(g.total(), 0);
    for (std::size_t i = 0; i < fam.centers.size(); ++i) {
        const double c = fam.centers[i][0], rho = fam.radii[i];
        IndexBox box = index_box(g, {c - rho, 0}, {c + rho, 0});
        for (std::int64_t k = box.lo[0]; k < box.hi[0]; ++k) {
            double v = family_bump(g.xi(k) - c, rho);
            if (v == 0.0) continue;
            if (owner[std::size_t(k)]) throw std::logic_error("extremal: bump supports overlap");
            owner[std::size_t(k)] = 1;
            F.coeffs[std::size_t(k)] = fam.weights[i] * v;
        }
    }
    return F;
}

// (sum (t_i <xi_i>^{t + d alpha2 / p'})^q)^{1/q} for scaled bumps, exponent t for fixed ones.
inline double family_model_alpha2(const SharpnessConfig& c, const ExtremalFamily& fam, double t) {
    const double ex = fam.mode == BumpMode::Scaled ? t + c.d * c.alpha2 * c.p.conjugate().recip_value() : t;
    double acc = 0;
    for (std::size_t i = 0; i < fam.centers.size(); ++i) {
        double term = fam.weights[i] * std::pow(bracket(fam.centers[i][0]), ex);
        acc = c.q.is_infinite() ? std::max(acc, term) : acc + std::pow(term, c.q.value());
    }
    return c.q.is_infinite() ? acc : std::pow(acc, 1.0 / c.q.value());
}

struct SharpnessSetup {
    SharpnessConfig config;
    std::vector<double> centers;
    double trunc_radius = 0.0;
    GridSpec grid;
    Bapu b1;  // alpha1 partition
    Bapu b2;  // alpha2 partition with the plateaus adjoined
};

inline SharpnessSetup sharpness_setup(const SharpnessConfig& c) {
    c.validate();
    SharpnessSetup S;
    S.config = c;
    const int nmax = *std::max_element(c.N_list.begin(), c.N_list.end());
    S.centers = plateau_centers(c, nmax);
    const double last = S.centers.back();
    S.trunc_radius = 1.02 * (last + plateau_radius(c, last)) + 4.0;
    const double L = kPi * double(c.n) / (2.0 * c.nyquist_margin * S.trunc_radius);
    S.grid = GridSpec{c.d, c.n, L};
    S.grid.validate();
    S.b1 = scale_bapu(c.d, c.alpha1, S.trunc_radius, S.grid);
    std::vector<Vec2> pc;
    for (double x : S.centers) pc.push_back({x, 0.0});
    S.b2 = adjoin_plateau(scale_bapu(c.d, c.alpha2, S.trunc_radius, S.grid), pc, c.rp);
    return S;
}

struct GrowthRow {
    int N = 0;
    double t = 0.0;
    double norm_alpha1 = 0.0;  // ||f_N||_{alpha1, s}
    double norm_alpha2 = 0.0;  // ||f_N||_{alpha2, t}
    double ratio = 0.0;
    double model_alpha2 = 0.0;
};

struct GrowthSummary {
    double threshold = 0.0;
    double t_above = 0.0;
    double growth_above = 0.0;  // rho(N_max) / rho(N_min) at t_above
    double band_at = 0.0;       // max / min of rho at the threshold
    bool pass_above = false;
    bool pass_at = false;
    BumpMode mode = BumpMode::Fixed;
    CorollaryRegion region;
    std::vector<GrowthRow> rows;
};

inline std::vector<GrowthRow> sharpness_growth(const SharpnessSetup& S, const std::vector<double>& ts) {
    const auto& c = S.config;
    std::vector<GrowthRow> rows;
    for (int N : c.N_list) {
        ExtremalFamily fam = extremal_family(c, S.centers, N);
        SpectralSignal F = family_spectrum(fam, S.grid);
        PieceTable t1 = piece_table(F, S.b1, {c.p});
        PieceTable t2 = piece_table(F, S.b2, {c.p});
        double n1 = assemble_norm(t1, c.p, c.q, c.s);
        for (double t : ts) {
            GrowthRow r;
            r.N = N;
            r.t = t;
            r.norm_alpha1 = n1;
            r.norm_alpha2 = assemble_norm(t2, c.p, c.q, t);
            r.ratio = r.norm_alpha2 / n1;
            r.model_alpha2 = family_model_alpha2(c, fam, t);
            rows.push_back(r);
        }
    }
    return rows;
}

inline GrowthSummary sharpness_experiment(const SharpnessSetup& S) {
    const auto& c = S.config;
    GrowthSummary G;
    G.mode = resolved_mode(c);
    G.region = corollary_region_check(c.p, c.q);
    G.threshold = sharpness_threshold(c);
    G.t_above = G.threshold + c.eps;
    G.rows = sharpness_growth(S, {G.t_above, G.threshold});
    const int nmin = *std::min_element(c.N_list.begin(), c.N_list.end());
    const int nmax = *std::max_element(c.N_list.begin(), c.N_list.end());
    double lo = HUGE_VAL, hi = 0, first = 0, last = 0;
    for (const auto& r : G.rows) {
        if (r.t == G.t_above) {
            if (r.N == nmin) first = r.ratio;
            if (r.N == nmax) last = r.ratio;
        } else {
            lo = std::min(lo, r.ratio);
            hi = std::max(hi, r.ratio);
        }
    }
    G.growth_above = last / first;
    G.band_at = hi / lo;
    G.pass_above = G.growth_above >= 2.0;
    G.pass_at = G.band_at <= 2.0;
    return G;
}

// ---------------------------------------------------------------------------
// Tables

inline io::CsvWriter embedding_csv() {
    return io::CsvWriter({"d", "alpha1", "alpha2", "p", "q", "s", "direction", "shift", "grid", "trunc_radius",
                          "signals", "min_ratio", "worst_ratio"});
}

inline void add_row(io::CsvWriter& w, const EmbeddingResult& r, const GridSpec& g, double T) {
    using io::fmt;
    w.row({std::to_string(r.c.d), fmt(r.c.alpha1), fmt(r.c.alpha2), r.c.p.str(), r.c.q.str(), fmt(r.c.s),
           direction_name(r.c.direction), fmt(r.shift), g.label(), fmt(T), std::to_string(r.signals_used),
           fmt(r.min_ratio), fmt(r.worst_ratio)});
}

inline io::CsvWriter growth_csv() {
    return io::CsvWriter({"d", "alpha1", "alpha2", "p", "q", "s", "mode", "t", "N", "norm_alpha1", "norm_alpha2",
                          "ratio", "model_alpha2"});
}

inline void add_rows(io::CsvWriter& w, const SharpnessConfig& c, const GrowthSummary& G) {
    using io::fmt;
    for (const auto& r : G.rows)
        w.row({std::to_string(c.d), fmt(c.alpha1), fmt(c.alpha2), c.p.str(), c.q.str(), fmt(c.s), bump_mode_name(G.mode),
               fmt(r.t), std::to_string(r.N), fmt(r.norm_alpha1), fmt(r.norm_alpha2), fmt(r.ratio), fmt(r.model_alpha2)});
}

inline io::json to_json(const GrowthSummary& G) {
    return io::json{{"mode", bump_mode_name(G.mode)},
                    {"threshold", G.threshold},
                    {"t_above", G.t_above},
                    {"growth_above", io::num(G.growth_above)},
                    {"band_at_threshold", io::num(G.band_at)},
                    {"pass_above", G.pass_above},
                    {"pass_at_threshold", G.pass_at},
                    {"sharp_upper_applies", G.region.sharp_upper_applies},
                    {"sharp_lower_applies", G.region.sharp_lower_applies}};
}

}  // namespace alphamod
