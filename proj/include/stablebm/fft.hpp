#pragma once
// Thin FFTW shim: complex-to-complex transforms of rank <= 2, plan creation
// serialized behind the planner mutex (FFTW's planner is not thread-safe;
// execution is). FFTW_ESTIMATE keeps planning deterministic and leaves the
// input untouched during planning.

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace sbm {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

// In-place DFT over the given dimensions; sign = FFTW_FORWARD (-1) or
// FFTW_BACKWARD (+1). Unnormalized, as is FFTW's convention.
inline void dft_inplace(const std::vector<int>& dims, std::complex<double>* data,
                        int sign) {
    fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p, sign,
                             FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
}

// Smallest 5-smooth integer >= n (FFT-friendly size).
inline int next_fast_size(int n) {
    if (n < 1) return 1;
    for (;; ++n) {
        int m = n;
        for (int f : {2, 3, 5})
            while (m % f == 0) m /= f;
        if (m == 1) return n;
    }
}

} // namespace sbm
