#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace alphamod {

using cplx = std::complex<double>;

// Uniform periodic grid on [-L, L)^d with n samples per axis.
// Spatial samples x_j = -L + j dx, spectral samples xi_m = pi m / L with
// m in [-n/2, n/2); spectral arrays are stored with m + n/2 as index.
struct GridSpec {
    int d = 1;
    std::size_t n = 1024;
    double L = 32.0;

    void validate() const {
        if (d != 1 && d != 2) throw std::invalid_argument("GridSpec: d must be 1 or 2");
        if (n < 4 || (n & (n - 1)) != 0) throw std::invalid_argument("GridSpec: n must be a power of two >= 4");
        if (!(L > 0)) throw std::invalid_argument("GridSpec: L must be positive");
    }

    double dx() const { return 2.0 * L / double(n); }
    double dxi() const { return kPi / L; }
    double nyquist() const { return kPi * double(n) / (2.0 * L); }
    std::size_t total() const { return ipow(n, d); }
    std::int64_t half() const { return std::int64_t(n / 2); }

    double xi(std::int64_t centered_index) const { return double(centered_index - half()) * dxi(); }
    double x(std::int64_t j) const { return -L + double(j) * dx(); }

    std::size_t offset(std::int64_t i0, std::int64_t i1) const {
        return d == 1 ? std::size_t(i0) : std::size_t(i0) * n + std::size_t(i1);
    }

    // Smallest centered index with xi >= v (clamped to the grid).
    std::int64_t index_at_or_above(double v) const {
        auto i = std::int64_t(std::ceil(v / dxi() - 1e-9)) + half();
        return std::clamp<std::int64_t>(i, 0, std::int64_t(n));
    }
    // One past the largest centered index with xi <= v (clamped).
    std::int64_t index_past(double v) const {
        auto i = std::int64_t(std::floor(v / dxi() + 1e-9)) + half() + 1;
        return std::clamp<std::int64_t>(i, 0, std::int64_t(n));
    }

    std::string label() const {
        return "d" + std::to_string(d) + "_n" + std::to_string(n) + "_L" + format_double(L);
    }

    static std::string format_double(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        std::string s(buf);
        for (int prec = 1; prec <= 17; ++prec) {
            std::snprintf(buf, sizeof buf, "%.*g", prec, v);
            if (std::strtod(buf, nullptr) == v) return buf;
        }
        return s;
    }

    friend bool operator==(const GridSpec& a, const GridSpec& b) { return a.d == b.d && a.n == b.n && a.L == b.L; }
};

// Half-open box of centered spectral indices; axis 1 is [0,1) when d = 1.
struct IndexBox {
    std::array<std::int64_t, 2> lo{0, 0};
    std::array<std::int64_t, 2> hi{0, 1};

    std::int64_t width(int a) const { return hi[a] - lo[a]; }
    std::size_t count() const { return empty() ? 0 : std::size_t(width(0)) * std::size_t(width(1)); }
    bool empty() const { return hi[0] <= lo[0] || hi[1] <= lo[1]; }
    bool contains(std::int64_t i0, std::int64_t i1) const {
        return i0 >= lo[0] && i0 < hi[0] && i1 >= lo[1] && i1 < hi[1];
    }
    std::size_t local(std::int64_t i0, std::int64_t i1) const {
        return std::size_t(i0 - lo[0]) * std::size_t(width(1)) + std::size_t(i1 - lo[1]);
    }
};

inline IndexBox intersect(const IndexBox& a, const IndexBox& b) {
    IndexBox r;
    for (int k = 0; k < 2; ++k) {
        r.lo[k] = std::max(a.lo[k], b.lo[k]);
        r.hi[k] = std::max(r.lo[k], std::min(a.hi[k], b.hi[k]));
    }
    return r;
}

// Index box of all grid samples inside the closed axis-aligned box [lo, hi].
inline IndexBox index_box(const GridSpec& g, const Vec2& lo, const Vec2& hi) {
    IndexBox b;
    for (int a = 0; a < g.d; ++a) {
        b.lo[a] = g.index_at_or_above(lo[a]);
        b.hi[a] = std::max(b.lo[a], g.index_past(hi[a]));
    }
    return b;
}

// Samples of a spectral quantity on an index box, row-major.
template <class T>
struct BoxSamples {
    IndexBox box;
    std::vector<T> values;

    T at(std::int64_t i0, std::int64_t i1) const { return box.contains(i0, i1) ? values[box.local(i0, i1)] : T{}; }
};

}  // namespace alphamod
