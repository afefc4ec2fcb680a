#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace alphamod {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a covering or partition fails its numerical certificate.
class CertificationError : public Error {
public:
    using Error::Error;
};

// Raised when a spectrum carries mass outside the certified region.
class LeakageError : public Error {
public:
    using Error::Error;
};

using Vec2 = std::array<double, 2>;

inline constexpr double kPi = 3.14159265358979323846;

inline double norm(const Vec2& v, int d) {
    return d == 1 ? std::abs(v[0]) : std::hypot(v[0], v[1]);
}

inline double dist(const Vec2& a, const Vec2& b, int d) {
    return d == 1 ? std::abs(a[0] - b[0]) : std::hypot(a[0] - b[0], a[1] - b[1]);
}

// Japanese bracket <x> = (1 + |x|^2)^{1/2}.
inline double bracket(double r) { return std::sqrt(1.0 + r * r); }
inline double bracket(const Vec2& v, int d) { return bracket(norm(v, d)); }

// C^infinity step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

// exp(1 - 1/(1-u^2)) on |u| < 1, equal to 1 at the origin.
inline double template_bump(double u2) {
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
}

inline std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ALPHAMOD_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, hw));
    }
    return hw;
}

// Runs f(i) for i in [0, n). Callers write results into per-index slots,
// so the outcome does not depend on the thread count.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    unsigned threads = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += threads) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

// Seeded generator with a portable mapping to uniform and normal variates.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// Least-squares slope of y against x.
inline double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace alphamod
