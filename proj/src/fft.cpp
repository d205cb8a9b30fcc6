#include "resolimit/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#ifdef RESOLIMIT_HAVE_FFTW
#include <fftw3.h>
#endif

namespace resolimit {

size_t next_pow2(size_t n) {
    size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

static bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

#ifdef RESOLIMIT_HAVE_FFTW

namespace {

struct PlanEntry {
    fftw_plan plan = nullptr;
    fftw_complex* buf = nullptr;
    size_t n = 0;
};

// Plan creation is not thread safe in FFTW; executions on the plan's own
// buffer are serialized per thread by keeping one cache per thread.
PlanEntry& plan_for(size_t n, int sign) {
    thread_local std::map<std::pair<size_t, int>, PlanEntry> cache;
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it == cache.end()) {
        static std::mutex planner_mu;
        std::lock_guard<std::mutex> lock(planner_mu);
        PlanEntry e;
        e.n = n;
        e.buf = fftw_alloc_complex(n);
        if (!e.buf) throw std::bad_alloc();
        const int dir = (sign > 0) ? FFTW_BACKWARD : FFTW_FORWARD;
        e.plan = fftw_plan_dft_1d(static_cast<int>(n), e.buf, e.buf, dir, FFTW_ESTIMATE);
        if (!e.plan) throw std::runtime_error("fftw_plan_dft_1d failed");
        it = cache.emplace(key, e).first;
    }
    return it->second;
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& a, int sign) {
    const size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_inplace: length must be a power of 2");
    PlanEntry& e = plan_for(n, sign);
    for (size_t i = 0; i < n; ++i) {
        e.buf[i][0] = a[i].real();
        e.buf[i][1] = a[i].imag();
    }
    fftw_execute(e.plan);
    for (size_t i = 0; i < n; ++i) a[i] = {e.buf[i][0], e.buf[i][1]};
}

#else

// Iterative radix-2 Cooley-Tukey fallback.
void fft_inplace(std::vector<std::complex<double>>& a, int sign) {
    const size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_inplace: length must be a power of 2");
    // Bit reversal permutation.
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

#endif

}  // namespace resolimit
