#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "core.hpp"

namespace alphamod {

enum class Shape { Ball, Cube, Annulus, Ball0 };
enum class CoveringKind { BallLattice, CubeLattice, Dyadic, Metric };

inline const char* shape_name(Shape s) {
    switch (s) {
        case Shape::Ball: return "ball";
        case Shape::Cube: return "cube";
        case Shape::Annulus: return "annulus";
        case Shape::Ball0: return "ball0";
    }
    return "?";
}

inline const char* kind_name(CoveringKind k) {
    switch (k) {
        case CoveringKind::BallLattice: return "ball_lattice";
        case CoveringKind::CubeLattice: return "cube_lattice";
        case CoveringKind::Dyadic: return "dyadic";
        case CoveringKind::Metric: return "metric";
    }
    return "?";
}

struct PatchId {
    enum class Kind { Lattice, Level, Index };
    Kind kind = Kind::Index;
    std::array<int, 2> k{};  // lattice vector
    int index = 0;           // dyadic level or running index

    static PatchId lattice(int k0, int k1 = 0) { return {Kind::Lattice, {k0, k1}, 0}; }
    static PatchId level(int j) { return {Kind::Level, {}, j}; }
    static PatchId running(int i) { return {Kind::Index, {}, i}; }

    std::string str(int d) const {
        switch (kind) {
            case Kind::Lattice:
                return d == 1 ? "k=" + std::to_string(k[0])
                              : "k=(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + ")";
            case Kind::Level: return "j=" + std::to_string(index);
            case Kind::Index: return "i=" + std::to_string(index);
        }
        return "?";
    }
};

// Ball: center, radius. Cube: center, half side in `radius`.
// Annulus: inner <= |xi| <= radius. Ball0: B(0, radius).
struct FrequencyPatch {
    PatchId id;
    Shape shape = Shape::Ball;
    Vec2 center{};
    double radius = 0.0;
    double inner = 0.0;
    Vec2 xi{};
};

struct Box2 {
    Vec2 lo{}, hi{};
};

inline std::pair<double, double> inner_outer_radius(const FrequencyPatch& P, int d) {
    switch (P.shape) {
        case Shape::Ball:
        case Shape::Ball0: return {P.radius, P.radius};
        case Shape::Cube: return {P.radius, P.radius * std::sqrt(double(d))};
        case Shape::Annulus: return {(P.radius - P.inner) / 2.0, P.radius};
    }
    return {0, 0};
}

// Range of |x| over the closed patch.
inline std::pair<double, double> abs_range(const FrequencyPatch& P, int d) {
    switch (P.shape) {
        case Shape::Ball: {
            double c = norm(P.center, d);
            return {std::max(0.0, c - P.radius), c + P.radius};
        }
        case Shape::Ball0: return {0.0, P.radius};
        case Shape::Cube: {
            double lo2 = 0, hi2 = 0;
            for (int a = 0; a < d; ++a) {
                double l = P.center[a] - P.radius, h = P.center[a] + P.radius;
                double nearest = (l > 0) ? l : (h < 0 ? h : 0.0);
                lo2 += nearest * nearest;
                double far = std::max(std::abs(l), std::abs(h));
                hi2 += far * far;
            }
            return {std::sqrt(lo2), std::sqrt(hi2)};
        }
        case Shape::Annulus: return {P.inner, P.radius};
    }
    return {0, 0};
}

inline double measure(const FrequencyPatch& P, int d) {
    auto ball = [d](double r) { return d == 1 ? 2.0 * r : kPi * r * r; };
    switch (P.shape) {
        case Shape::Ball:
        case Shape::Ball0: return ball(P.radius);
        case Shape::Cube: return std::pow(2.0 * P.radius, d);
        case Shape::Annulus: return ball(P.radius) - ball(P.inner);
    }
    return 0;
}

inline Box2 bounding_box(const FrequencyPatch& P, int d) {
    Box2 b;
    for (int a = 0; a < d; ++a) {
        if (P.shape == Shape::Ball || P.shape == Shape::Cube) {
            b.lo[a] = P.center[a] - P.radius;
            b.hi[a] = P.center[a] + P.radius;
        } else {
            b.lo[a] = -P.radius;
            b.hi[a] = P.radius;
        }
    }
    return b;
}

// Closed membership with a relative slack of 1e-12.
inline bool contains(const FrequencyPatch& P, const Vec2& x, int d) {
    constexpr double slack = 1e-12;
    switch (P.shape) {
        case Shape::Ball: return dist(x, P.center, d) <= P.radius * (1 + slack);
        case Shape::Ball0: return norm(x, d) <= P.radius * (1 + slack);
        case Shape::Cube:
            for (int a = 0; a < d; ++a)
                if (std::abs(x[a] - P.center[a]) > P.radius * (1 + slack)) return false;
            return true;
        case Shape::Annulus: {
            double r = norm(x, d);
            return r >= P.inner * (1 - slack) && r <= P.radius * (1 + slack);
        }
    }
    return false;
}

namespace detail {

inline bool less_strict(double a, double b) { return a < b - 1e-12 * std::max(1.0, std::abs(b)); }

inline double dist_to_cube(const Vec2& x, const FrequencyPatch& cube, int d) {
    double s = 0;
    for (int a = 0; a < d; ++a) {
        double e = std::max(0.0, std::abs(x[a] - cube.center[a]) - cube.radius);
        s += e * e;
    }
    return std::sqrt(s);
}

inline bool radial_meets(const FrequencyPatch& P, double a, double b, int d) {
    auto [lo, hi] = abs_range(P, d);
    return less_strict(lo, b) && less_strict(a, hi);
}

}  // namespace detail

// True iff the open interiors of the two patches overlap.
inline bool intersects(const FrequencyPatch& A, const FrequencyPatch& B, int d) {
    using detail::less_strict;
    auto as_ball = [](const FrequencyPatch& P) {
        FrequencyPatch b = P;
        if (P.shape == Shape::Ball0) {
            b.shape = Shape::Ball;
            b.center = {0, 0};
        }
        return b;
    };
    FrequencyPatch a = as_ball(A), b = as_ball(B);
    if (a.shape == Shape::Annulus) return detail::radial_meets(b, a.inner, a.radius, d);
    if (b.shape == Shape::Annulus) return detail::radial_meets(a, b.inner, b.radius, d);
    if (a.shape == Shape::Ball && b.shape == Shape::Ball)
        return less_strict(dist(a.center, b.center, d), a.radius + b.radius);
    if (a.shape == Shape::Cube && b.shape == Shape::Cube) {
        for (int k = 0; k < d; ++k)
            if (!less_strict(std::abs(a.center[k] - b.center[k]), a.radius + b.radius)) return false;
        return true;
    }
    const FrequencyPatch& ball = a.shape == Shape::Ball ? a : b;
    const FrequencyPatch& cube = a.shape == Shape::Ball ? b : a;
    return less_strict(detail::dist_to_cube(ball.center, cube, d), ball.radius);
}

// Over-approximation through circumscribed balls about the origin-centered
// or patch-centered hull.
inline bool intersects_circumscribed(const FrequencyPatch& A, const FrequencyPatch& B, int d) {
    auto hull = [d](const FrequencyPatch& P) -> std::pair<Vec2, double> {
        if (P.shape == Shape::Ball || P.shape == Shape::Cube) return {P.center, inner_outer_radius(P, d).second};
        return {Vec2{0, 0}, P.radius};
    };
    auto [ca, ra] = hull(A);
    auto [cb, rb] = hull(B);
    return detail::less_strict(dist(ca, cb, d), ra + rb);
}

struct PatchCertificate {
    int degree = 0;  // number of patches met, itself included
    double ratio_min = 0.0;
    double ratio_max = 0.0;
};

struct CertificateReport {
    int n0 = 0;
    double K = 1.0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    double ratio_spread = 1.0;
    bool complete = true;
    std::size_t samples_checked = 0;
    std::size_t uncovered = 0;
    Vec2 first_uncovered{};
    std::vector<PatchCertificate> patches;

    bool passed() const { return complete && n0 > 0; }
};

struct Covering {
    CoveringKind kind = CoveringKind::BallLattice;
    int d = 1;
    double alpha = 0.0;
    double r = 1.0;
    double beta = 0.0;
    double trunc_radius = 0.0;
    std::vector<FrequencyPatch> patches;
    int height_n0 = 0;
    double ratio_K = 1.0;
    double ratio_spread = 1.0;

    std::size_t size() const { return patches.size(); }
};

// Uniform hash grid over patch bounding boxes. Patches much larger than a
// cell are kept in a separate list that every query returns.
class PatchIndex {
public:
    PatchIndex(const std::vector<FrequencyPatch>& patches, int d) : d_(d) {
        std::vector<double> widths;
        widths.reserve(patches.size());
        for (const auto& P : patches) {
            Box2 b = bounding_box(P, d);
            widths.push_back(b.hi[0] - b.lo[0]);
        }
        if (!widths.empty()) {
            auto mid = widths.begin() + std::ptrdiff_t(widths.size() / 2);
            std::nth_element(widths.begin(), mid, widths.end());
            cell_ = std::max(*mid, 1e-9);
        }
        for (std::size_t i = 0; i < patches.size(); ++i) {
            Box2 b = bounding_box(patches[i], d);
            auto lo = cell_of(b.lo), hi = cell_of(b.hi);
            std::int64_t span = (hi[0] - lo[0] + 1) * (d == 2 ? hi[1] - lo[1] + 1 : 1);
            if (span > 256) {
                big_.push_back(int(i));
                continue;
            }
            for (std::int64_t u = lo[0]; u <= hi[0]; ++u)
                for (std::int64_t v = (d == 2 ? lo[1] : 0); v <= (d == 2 ? hi[1] : 0); ++v)
                    cells_[key(u, v)].push_back(int(i));
        }
    }

    // Candidate indices whose bounding boxes may meet the query box (sorted, unique).
    std::vector<int> query(const Box2& box) const {
        std::vector<int> out(big_);
        auto lo = cell_of(box.lo), hi = cell_of(box.hi);
        for (std::int64_t u = lo[0]; u <= hi[0]; ++u)
            for (std::int64_t v = (d_ == 2 ? lo[1] : 0); v <= (d_ == 2 ? hi[1] : 0); ++v) {
                auto it = cells_.find(key(u, v));
                if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
            }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    template <class F>
    bool any_at(const Vec2& x, F&& pred) const {
        for (int i : big_)
            if (pred(i)) return true;
        auto c = cell_of(x);
        auto it = cells_.find(key(c[0], d_ == 2 ? c[1] : 0));
        if (it == cells_.end()) return false;
        for (int i : it->second)
            if (pred(i)) return true;
        return false;
    }

private:
    std::array<std::int64_t, 2> cell_of(const Vec2& x) const {
        return {std::int64_t(std::floor(x[0] / cell_)), d_ == 2 ? std::int64_t(std::floor(x[1] / cell_)) : 0};
    }
    static std::int64_t key(std::int64_t u, std::int64_t v) { return (u << 32) ^ (v & 0xffffffffLL); }

    int d_;
    double cell_ = 1.0;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
    std::vector<int> big_;
};

// Adjacency lists of the patch intersection graph (self excluded, sorted).
inline std::vector<std::vector<int>> intersection_graph(const Covering& C) {
    PatchIndex index(C.patches, C.d);
    std::vector<std::vector<int>> adj(C.size());
    parallel_for(C.size(), [&](std::size_t i) {
        for (int j : index.query(bounding_box(C.patches[i], C.d)))
            if (std::size_t(j) != i && intersects(C.patches[i], C.patches[j], C.d)) adj[i].push_back(j);
    });
    return adj;
}

namespace detail {

inline std::vector<Vec2> coverage_samples(int d, double T, double density) {
    std::vector<Vec2> pts;
    if (T <= 0) return pts;
    double h = 1.0 / density;
    auto m = std::int64_t(std::floor(T / h));
    std::vector<double> axis;
    for (std::int64_t i = -m; i <= m; ++i) axis.push_back(double(i) * h);
    if (m * h < T) {
        axis.insert(axis.begin(), -T);
        axis.push_back(T);
    }
    if (d == 1) {
        for (double x : axis) pts.push_back({x, 0});
    } else {
        for (double x : axis)
            for (double y : axis)
                if (x * x + y * y <= T * T) pts.push_back({x, y});
        for (int k = 0; k < 64 * int(std::ceil(T)); ++k) {
            double t = 2 * kPi * k / (64 * std::ceil(T));
            pts.push_back({T * std::cos(t), T * std::sin(t)});
        }
    }
    return pts;
}

}  // namespace detail

// Certifies height, eccentricity, measure comparability and coverage of
// B(0, trunc_radius). The measure ratio uses the exact range of |x| over
// each patch, so its extremes are attained rather than sampled.
inline CertificateReport certify_alpha_covering(const Covering& C, double sample_density = 4.0) {
    CertificateReport rep;
    const int d = C.d;
    const std::size_t n = C.size();
    rep.patches.resize(n);
    PatchIndex index(C.patches, d);
    parallel_for(n, [&](std::size_t i) {
        const auto& P = C.patches[i];
        int deg = 0;
        for (int j : index.query(bounding_box(P, d)))
            if (std::size_t(j) == i || intersects(P, C.patches[j], d)) ++deg;
        auto [lo, hi] = abs_range(P, d);
        double mu = measure(P, d);
        rep.patches[i] = {deg, mu / std::pow(bracket(hi), C.alpha * d), mu / std::pow(bracket(lo), C.alpha * d)};
    });
    rep.ratio_min = HUGE_VAL;
    rep.ratio_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rep.n0 = std::max(rep.n0, rep.patches[i].degree);
        auto [ri, Ro] = inner_outer_radius(C.patches[i], d);
        rep.K = std::max(rep.K, Ro / ri);
        rep.ratio_min = std::min(rep.ratio_min, rep.patches[i].ratio_min);
        rep.ratio_max = std::max(rep.ratio_max, rep.patches[i].ratio_max);
    }
    if (n == 0) rep.ratio_min = rep.ratio_max = 0.0;
    rep.ratio_spread = rep.ratio_min > 0 ? rep.ratio_max / rep.ratio_min : 1.0;

    auto samples = detail::coverage_samples(d, C.trunc_radius, sample_density);
    rep.samples_checked = samples.size();
    std::vector<char> hit(samples.size(), 0);
    parallel_for(samples.size(), [&](std::size_t s) {
        hit[s] = index.any_at(samples[s], [&](int i) { return contains(C.patches[i], samples[s], d); });
    });
    for (std::size_t s = 0; s < samples.size(); ++s) {
        if (hit[s]) continue;
        if (rep.uncovered == 0) rep.first_uncovered = samples[s];
        ++rep.uncovered;
    }
    rep.complete = rep.uncovered == 0;
    return rep;
}

inline void attach_certificate(Covering& C, const CertificateReport& rep) {
    C.height_n0 = rep.n0;
    C.ratio_K = rep.K;
    C.ratio_spread = rep.ratio_spread;
}

namespace detail {

inline Covering lattice_covering(int d, double alpha, double r, double T, Shape shape) {
    if (d != 1 && d != 2) throw std::invalid_argument("covering: only d = 1 or 2 is supported");
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("covering: lattice coverings need alpha in [0,1); use build_dyadic_covering for alpha = 1");
    if (!(r > 0)) throw std::invalid_argument("covering: r must be positive");
    if (!(T >= 0)) throw std::invalid_argument("covering: trunc_radius must be nonnegative");
    Covering C;
    C.kind = shape == Shape::Ball ? CoveringKind::BallLattice : CoveringKind::CubeLattice;
    C.d = d;
    C.alpha = alpha;
    C.r = r;
    C.beta = alpha / (1.0 - alpha);
    C.trunc_radius = T;
    const double beta = C.beta;
    // Closest point to the origin of the patch for |k| = m is at m^b (m - r sqrt(d)) or better.
    auto reaches = [&](double m) {
        double s = std::pow(m, beta);
        double reach = shape == Shape::Ball ? r : r * std::sqrt(double(d));
        return m * s - reach * s <= T;
    };
    int kmax = 1;
    while (reaches(double(kmax)) || double(kmax) <= r * std::sqrt(double(d)) + 1) ++kmax;
    for (int k0 = -kmax; k0 <= kmax; ++k0)
        for (int k1 = (d == 2 ? -kmax : 0); k1 <= (d == 2 ? kmax : 0); ++k1) {
            if (k0 == 0 && k1 == 0) continue;
            double m = d == 1 ? std::abs(double(k0)) : std::hypot(double(k0), double(k1));
            double s = std::pow(m, beta);
            FrequencyPatch P;
            P.id = PatchId::lattice(k0, k1);
            P.shape = shape;
            P.center = {k0 * s, d == 2 ? k1 * s : 0.0};
            P.radius = r * s;
            P.xi = P.center;
            if (abs_range(P, d).first <= T) C.patches.push_back(P);
        }
    return C;
}

inline Covering certified_lattice(int d, double alpha, std::optional<double> r, double T, Shape shape,
                                  double density) {
    if (r) {
        Covering C = lattice_covering(d, alpha, *r, T, shape);
        auto rep = certify_alpha_covering(C, density);
        if (!rep.complete)
            throw CertificationError("covering with r = " + std::to_string(*r) + " leaves " +
                                     std::to_string(rep.uncovered) + " sample points uncovered");
        attach_certificate(C, rep);
        return C;
    }
    const double sd = std::sqrt(double(d));
    auto attempt = [&](double rr) -> std::optional<std::pair<Covering, CertificateReport>> {
        Covering C = lattice_covering(d, alpha, rr, T, shape);
        auto rep = certify_alpha_covering(C, density);
        if (!rep.complete) return std::nullopt;
        return std::make_pair(std::move(C), std::move(rep));
    };
    if (auto ok = attempt(2 * sd)) {
        attach_certificate(ok->first, ok->second);
        return std::move(ok->first);
    }
    double lo = sd, hi = 8 * sd;
    auto best = attempt(hi);
    if (!best) throw CertificationError("covering: no r in [sqrt(d), 8 sqrt(d)] certifies");
    for (int it = 0; it < 30; ++it) {
        double mid = 0.5 * (lo + hi);
        if (auto ok = attempt(mid)) {
            hi = mid;
            best = std::move(ok);
        } else {
            lo = mid;
        }
    }
    attach_certificate(best->first, best->second);
    return std::move(best->first);
}

}  // namespace detail

// Balls B(k|k|^beta, r|k|^beta), k != 0. Without r the default 2 sqrt(d) is
// tried first, then the smallest certifying r in [sqrt(d), 8 sqrt(d)].
inline Covering build_ball_covering(int d, double alpha, std::optional<double> r, double trunc_radius,
                                    double sample_density = 4.0) {
    return detail::certified_lattice(d, alpha, r, trunc_radius, Shape::Ball, sample_density);
}

inline Covering build_cube_covering(int d, double alpha, std::optional<double> r, double trunc_radius,
                                    double sample_density = 4.0) {
    return detail::certified_lattice(d, alpha, r, trunc_radius, Shape::Cube, sample_density);
}

// B(0,1) and the annuli 2^{j-2} <= |xi| <= 2^j for every j whose annulus meets B(0, T).
inline Covering build_dyadic_covering(int d, double trunc_radius, double sample_density = 4.0) {
    if (d != 1 && d != 2) throw std::invalid_argument("covering: only d = 1 or 2 is supported");
    if (!(trunc_radius >= 0)) throw std::invalid_argument("covering: trunc_radius must be nonnegative");
    Covering C;
    C.kind = CoveringKind::Dyadic;
    C.d = d;
    C.alpha = 1.0;
    C.r = 1.0;
    C.beta = HUGE_VAL;
    C.trunc_radius = trunc_radius;
    FrequencyPatch P0;
    P0.id = PatchId::level(0);
    P0.shape = Shape::Ball0;
    P0.radius = 1.0;
    C.patches.push_back(P0);
    for (int j = 1; std::ldexp(1.0, j - 2) <= trunc_radius; ++j) {
        FrequencyPatch P;
        P.id = PatchId::level(j);
        P.shape = Shape::Annulus;
        P.inner = std::ldexp(1.0, j - 2);
        P.radius = std::ldexp(1.0, j);
        P.xi = {0.5 * (P.inner + P.radius), 0.0};
        C.patches.push_back(P);
    }
    auto rep = certify_alpha_covering(C, sample_density);
    if (!rep.complete) throw CertificationError("dyadic covering incomplete");
    attach_certificate(C, rep);
    return C;
}

// Greedy packing of quarter balls B(xi, r<xi>^alpha/4) scanned by increasing
// |xi| over a candidate lattice; the half balls form the covering.
inline Covering build_metric_covering(int d, double alpha, double r, double trunc_radius,
                                      double sample_density = 4.0) {
    if (d != 1 && d != 2) throw std::invalid_argument("covering: only d = 1 or 2 is supported");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("covering: alpha must lie in [0,1]");
    if (!(r > 0 && r < 1)) throw std::invalid_argument("metric covering: r must lie in (0,1)");
    if (!(trunc_radius >= 0)) throw std::invalid_argument("covering: trunc_radius must be nonnegative");
    const double T = trunc_radius;
    auto quarter = [&](const Vec2& x) { return r * std::pow(bracket(x, d), alpha) / 4.0; };
    const double reach = T + 2.0 * r * std::pow(bracket(T + 1.0), alpha) + 1.0;
    const double delta = r / 12.0;
    const auto m = std::int64_t(std::ceil(reach / delta));

    std::vector<Vec2> cand;
    for (std::int64_t i = -m; i <= m; ++i)
        for (std::int64_t j = (d == 2 ? -m : 0); j <= (d == 2 ? m : 0); ++j) {
            Vec2 x{double(i) * delta, double(j) * delta};
            if (norm(x, d) <= reach) cand.push_back(x);
        }
    std::stable_sort(cand.begin(), cand.end(), [&](const Vec2& a, const Vec2& b) {
        double na = a[0] * a[0] + a[1] * a[1], nb = b[0] * b[0] + b[1] * b[1];
        if (na != nb) return na < nb;
        return a < b;
    });

    const double cell = 2.0 * quarter({reach, 0});
    std::unordered_map<std::int64_t, std::vector<int>> grid;
    auto cell_of = [&](double v) { return std::int64_t(std::floor(v / cell)); };
    auto key = [](std::int64_t u, std::int64_t v) { return (u << 32) ^ (v & 0xffffffffLL); };
    std::vector<Vec2> centers;
    std::vector<double> radii;
    for (const Vec2& x : cand) {
        double rho = quarter(x);
        bool free = true;
        std::int64_t cu = cell_of(x[0]), cv = d == 2 ? cell_of(x[1]) : 0;
        for (std::int64_t u = cu - 1; u <= cu + 1 && free; ++u)
            for (std::int64_t v = (d == 2 ? cv - 1 : 0); v <= (d == 2 ? cv + 1 : 0) && free; ++v) {
                auto it = grid.find(key(u, v));
                if (it == grid.end()) continue;
                for (int k : it->second)
                    if (dist(x, centers[k], d) < rho + radii[k] - 1e-12) {
                        free = false;
                        break;
                    }
            }
        if (!free) continue;
        grid[key(cu, cv)].push_back(int(centers.size()));
        centers.push_back(x);
        radii.push_back(rho);
    }

    Covering C;
    C.kind = CoveringKind::Metric;
    C.d = d;
    C.alpha = alpha;
    C.r = r;
    C.beta = alpha < 1 ? alpha / (1 - alpha) : HUGE_VAL;
    C.trunc_radius = T;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        FrequencyPatch P;
        P.shape = Shape::Ball;
        P.center = centers[i];
        P.radius = 2.0 * radii[i];
        P.xi = centers[i];
        if (abs_range(P, d).first > T) continue;
        P.id = PatchId::running(int(C.patches.size()));
        C.patches.push_back(P);
    }
    auto rep = certify_alpha_covering(C, sample_density);
    if (!rep.complete)
        throw CertificationError("metric covering leaves " + std::to_string(rep.uncovered) +
                                 " sample points uncovered");
    attach_certificate(C, rep);
    return C;
}

struct NeighborMap {
    std::vector<std::vector<int>> omega;   // per fine patch i: coarse patches meeting it
    std::vector<std::vector<int>> lambda;  // per coarse patch j: fine patches meeting it
    std::vector<int> omega_upper;          // circumscribed-ball over-count of |omega_i|
};

// `coarse` is the alpha1 covering (smaller patches), `fine` the alpha2 one.
inline NeighborMap neighbor_map(const Covering& coarse, const Covering& fine) {
    if (coarse.d != fine.d) throw std::invalid_argument("neighbor_map: dimension mismatch");
    if (coarse.alpha > fine.alpha) throw std::invalid_argument("neighbor_map: requires alpha1 <= alpha2");
    const int d = coarse.d;
    PatchIndex index(coarse.patches, d);
    NeighborMap M;
    M.omega.resize(fine.size());
    M.omega_upper.resize(fine.size());
    parallel_for(fine.size(), [&](std::size_t i) {
        const auto& P = fine.patches[i];
        Box2 box = bounding_box(P, d);
        auto [c, R] = std::pair<Vec2, double>{P.center, inner_outer_radius(P, d).second};
        if (P.shape == Shape::Cube || P.shape == Shape::Ball) {
            for (int a = 0; a < d; ++a) {
                box.lo[a] = c[a] - R;
                box.hi[a] = c[a] + R;
            }
        }
        int upper = 0;
        for (int j : index.query(box)) {
            if (intersects(P, coarse.patches[j], d)) M.omega[i].push_back(j);
            if (intersects_circumscribed(P, coarse.patches[j], d)) ++upper;
        }
        M.omega_upper[i] = upper;
    });
    M.lambda.resize(coarse.size());
    for (std::size_t i = 0; i < fine.size(); ++i)
        for (int j : M.omega[i]) M.lambda[j].push_back(int(i));
    return M;
}

struct CountingStats {
    double omega_ratio_max = 0.0;  // max_i |Omega_i| / <xi_i>^{d(alpha2-alpha1)}
    double omega_upper_ratio_max = 0.0;
    int lambda_max = 0;
    double weight_C = 1.0;         // max <xi_i>/<eta_j> or its inverse over j in Omega_i
};

inline CountingStats counting_statistics(const Covering& coarse, const Covering& fine, const NeighborMap& M) {
    const int d = coarse.d;
    const double gap = d * (fine.alpha - coarse.alpha);
    CountingStats st;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        double wi = bracket(fine.patches[i].xi, d);
        double scale = std::pow(wi, gap);
        st.omega_ratio_max = std::max(st.omega_ratio_max, double(M.omega[i].size()) / scale);
        st.omega_upper_ratio_max = std::max(st.omega_upper_ratio_max, double(M.omega_upper[i]) / scale);
        for (int j : M.omega[i]) {
            double wj = bracket(coarse.patches[j].xi, d);
            st.weight_C = std::max(st.weight_C, std::max(wi / wj, wj / wi));
        }
    }
    for (const auto& l : M.lambda) st.lambda_max = std::max(st.lambda_max, int(l.size()));
    return st;
}

// Greedy coloring of the intersection graph in patch order.
inline std::vector<std::vector<int>> disjointize(const Covering& C) {
    auto adj = intersection_graph(C);
    std::vector<int> color(C.size(), -1);
    std::vector<std::vector<int>> classes;
    for (std::size_t i = 0; i < C.size(); ++i) {
        std::vector<char> used(classes.size() + 1, 0);
        for (int j : adj[i])
            if (color[j] >= 0) used[color[j]] = 1;
        int c = 0;
        while (used[c]) ++c;
        color[i] = c;
        if (std::size_t(c) == classes.size()) classes.emplace_back();
        classes[c].push_back(int(i));
    }
    return classes;
}

// Uniformly drawn interior points, one per patch, as alternative xi_Q.
inline std::vector<Vec2> random_designated_points(const Covering& C, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec2> out;
    out.reserve(C.size());
    for (const auto& P : C.patches) {
        Box2 b = bounding_box(P, C.d);
        for (;;) {
            Vec2 x{b.lo[0] + (b.hi[0] - b.lo[0]) * rng.uniform(),
                   C.d == 2 ? b.lo[1] + (b.hi[1] - b.lo[1]) * rng.uniform() : 0.0};
            if (contains(P, x, C.d)) {
                out.push_back(x);
                break;
            }
        }
    }
    return out;
}

// Weight base for patch i: 2^j on dyadic coverings, <xi_Q> otherwise.
inline double weight_base(const Covering& C, std::size_t i) {
    const auto& P = C.patches[i];
    if (C.kind == CoveringKind::Dyadic && P.id.kind == PatchId::Kind::Level) return std::ldexp(1.0, P.id.index);
    return bracket(P.xi, C.d);
}

}  // namespace alphamod
