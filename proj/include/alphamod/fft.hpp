#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace alphamod::fft {

// FFTW plans are created once per shape under a lock; execution goes
// through the new-array interface, which is thread safe.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan dft(int rank, int n0, int n1, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(0, rank, n0, n1, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> buf(std::size_t(n0) * std::size_t(rank == 2 ? n1 : 1));
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        int dims[2] = {n0, n1};
        fftw_plan plan = fftw_plan_dft(rank, dims, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    fftw_plan dct4(int n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(1, 1, n, 0, 0);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<double> buf(static_cast<std::size_t>(n));
        fftw_plan plan = fftw_plan_r2r_1d(n, buf.data(), buf.data(), FFTW_REDFT11, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::tuple<int, int, int, int, int>, fftw_plan> plans_;
};

// Unnormalized in-place DFT; sign -1 is forward (e^{-2 pi i jk/n}).
inline void dft_inplace(std::vector<std::complex<double>>& data, int rank, int n0, int n1, int sign) {
    fftw_plan plan = PlanCache::instance().dft(rank, n0, n1, sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

// In-place DCT-IV: y_k = 2 sum_j x_j cos(pi (j+1/2)(k+1/2)/n).
inline void dct4_inplace(double* data, int n) {
    fftw_plan plan = PlanCache::instance().dct4(n);
    fftw_execute_r2r(plan, data, data);
}

}  // namespace alphamod::fft
