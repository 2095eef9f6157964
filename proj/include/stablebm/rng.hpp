#pragma once
// Splittable counter-based RNG streams.
//
// Each stream is SplitMix64 with a per-stream odd increment ("gamma"): the
// n-th output is mix64(state0 + n*gamma). Streams are keyed by
// (master_seed, stream_id) only, so draws are bitwise reproducible no matter
// how work is scheduled across threads, and a stream can be re-created anywhere.

#include <cmath>
#include <cstdint>

namespace sbm {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
} // namespace detail

class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
        std::uint64_t a = detail::mix64(master_seed ^ 0x8BB84B93962EACC9ULL);
        std::uint64_t b = detail::mix64(stream_id + 0x2545F4914F6CDD1DULL);
        state_ = detail::mix64(a + b);
        gamma_ = detail::mix64(b ^ a) | 1ULL; // odd => full-period counter
    }

    std::uint64_t next_u64() {
        state_ += gamma_;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe for log().
    double next_open() { return 1.0 - next_double(); }

    double next_exp() { return -std::log(next_open()); }

    // Standard Gaussian, Box-Muller. Stateless across calls: every call draws
    // a fresh uniform pair (one variate discarded), so the consumption pattern
    // is deterministic regardless of call interleaving.
    double next_gaussian() {
        double r = std::sqrt(2.0 * next_exp());
        double u = next_double();
        return r * std::cos(2.0 * M_PI * u);
    }

    // Fill n standard Gaussians using ceil(n/2) Box-Muller pairs.
    void fill_gaussian(double* out, int n) {
        int i = 0;
        while (i + 1 < n) {
            double r = std::sqrt(2.0 * next_exp());
            double u = 2.0 * M_PI * next_double();
            out[i++] = r * std::cos(u);
            out[i++] = r * std::sin(u);
        }
        if (i < n) out[i] = next_gaussian();
    }

  private:
    std::uint64_t state_;
    std::uint64_t gamma_;
};

} // namespace sbm
