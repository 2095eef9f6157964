#pragma once
// Grid application of the two convolution semigroups.
//
// Horizontal route: the kernel with symbol exp(-time |xi|^beta) is realized
// on a padded periodic lattice as the inverse DFT of symbol samples, clipped
// at zero and renormalized to exact unit discrete mass. Circular convolution
// with that kernel conserves discrete mass exactly and contracts the sup
// norm. The remaining error is the wraparound of the true kernel around the
// padded circle, bounded by a ring sum over wrap images
//     min( zeta-weighted ||f||_1 sup_{|y|>=gap} k(y),  ||f||_inf mass(k; |y|>=gap) ),
// gap = padded span minus window span. The padding search doubles the margin
// until the bound passes; heavy kernel tails can make the budget unreachable
// on any affordable lattice, which raises an error naming the escaped mass.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft.hpp"
#include "grid.hpp"
#include "params.hpp"
#include "quad.hpp"
#include "stable_density.hpp"

namespace sbm {

struct ExtendOptions {
    double pad_tol = 1e-6;                   // wraparound budget
    std::size_t max_total_cells = 1u << 23;  // padded-lattice cell cap
    int min_pad = 8;
};

namespace detail {

inline double wrap_bound(int d, double beta, double time, double gap, double l1,
                         double linf) {
    const StableProfile& prof = get_profile(d, beta);
    double peak = prof.density(time, gap);
    double tail = prof.tail_mass(gap * std::pow(time, -1.0 / beta));
    // ring sum over wrap images: the w-th image sits at distance >= w * gap,
    // with ~2 images per ring in one dimension and ~8w in two, so the peak
    // route picks up a zeta(1+beta) factor (large for heavy tails); the tail
    // route counts disjoint far windows once, plus a lattice-sum cushion
    double ring = (d == 1 ? 2.5 : 10.0) * std::riemann_zeta(1.0 + beta);
    return std::min(ring * l1 * peak, 1.5 * linf * tail);
}

struct PaddedLayout {
    std::vector<int> dims;  // padded lattice sizes
    double gap = 0.0;       // min over axes of (padded - window) span
    double bound = 0.0;     // wraparound bound achieved
    std::size_t cells() const {
        std::size_t n = 1;
        for (int e : dims) n *= static_cast<std::size_t>(e);
        return n;
    }
};

// Grow the padding until the wraparound bound passes; throws when the cell
// cap is reached first.
inline PaddedLayout plan_padding(const GridFunction& f, double beta, double time,
                                 double l1, double linf, const ExtendOptions& opt) {
    PaddedLayout lay;
    int pad = opt.min_pad;
    for (;;) {
        lay.dims.assign(f.extent.begin(), f.extent.end());
        double gap = HUGE_VAL;
        for (int a = 0; a < f.d; ++a) {
            lay.dims[a] = next_fast_size(f.extent[a] + 2 * pad);
            gap = std::min(gap, (lay.dims[a] - f.extent[a]) * f.spacing);
        }
        lay.gap = gap;
        lay.bound = wrap_bound(f.d, beta, time, gap, l1, linf);
        if (lay.bound <= opt.pad_tol) return lay;
        if (lay.cells() > opt.max_total_cells)
            throw ToleranceError(
                "insufficient padding: escaped kernel mass bound " +
                    std::to_string(lay.bound) + " exceeds tolerance " +
                    std::to_string(opt.pad_tol) + " at " + std::to_string(lay.cells()) +
                    " cells",
                lay.bound);
        pad *= 2;
    }
}

// Symbol exp(-time |xi|^beta) on the DFT frequencies, inverse-transformed,
// clipped at zero and renormalized to exact unit discrete mass.
inline std::vector<double> periodized_kernel(const std::vector<int>& dims, double h,
                                             double beta, double time) {
    const int rank = static_cast<int>(dims.size());
    std::size_t n = 1;
    for (int e : dims) n *= static_cast<std::size_t>(e);
    std::vector<std::complex<double>> buf(n);
    const double two_pi = 2.0 * M_PI;
    if (rank == 1) {
        const int n0 = dims[0];
        for (int m = 0; m < n0; ++m) {
            int f0 = m <= n0 / 2 ? m : m - n0;
            double xi = two_pi * f0 / (n0 * h);
            buf[m] = std::exp(-time * std::pow(std::fabs(xi), beta));
        }
    } else if (rank == 2) {
        const int n0 = dims[0], n1 = dims[1];
        for (int m0 = 0; m0 < n0; ++m0) {
            int f0 = m0 <= n0 / 2 ? m0 : m0 - n0;
            double xi0 = two_pi * f0 / (n0 * h);
            for (int m1 = 0; m1 < n1; ++m1) {
                int f1 = m1 <= n1 / 2 ? m1 : m1 - n1;
                double xi1 = two_pi * f1 / (n1 * h);
                double xi = std::hypot(xi0, xi1);
                buf[static_cast<std::size_t>(m0) * n1 + m1] =
                    std::exp(-time * std::pow(xi, beta));
            }
        }
    } else {
        throw std::domain_error("periodized_kernel: rank must be 1 or 2");
    }
    dft_inplace(dims, buf.data(), FFTW_BACKWARD);
    const double hd = std::pow(h, rank);
    std::vector<double> k(n);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = buf[i].real() / (static_cast<double>(n) * hd);
        if (v < 0.0) v = 0.0;
        k[i] = v;
        mass += v;
    }
    mass *= hd;
    if (!(mass > 0.0)) throw std::runtime_error("periodized_kernel: empty kernel");
    for (double& v : k) v /= mass;
    return k;
}

// h^d-weighted circular convolution of two real arrays on the same lattice.
inline std::vector<double> convolve_periodic(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             const std::vector<int>& dims, double h) {
    std::size_t n = a.size();
    std::vector<std::complex<double>> fa(n), fb(n);
    for (std::size_t i = 0; i < n; ++i) { fa[i] = a[i]; fb[i] = b[i]; }
    dft_inplace(dims, fa.data(), FFTW_FORWARD);
    dft_inplace(dims, fb.data(), FFTW_FORWARD);
    const double scale = std::pow(h, dims.size()) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    dft_inplace(dims, fa.data(), FFTW_BACKWARD);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fa[i].real() * scale;
    return out;
}

inline std::vector<double> embed(const GridFunction& f, const std::vector<double>& vals,
                                 const std::vector<int>& dims) {
    std::size_t n = 1;
    for (int e : dims) n *= static_cast<std::size_t>(e);
    std::vector<double> out(n, 0.0);
    if (f.d == 1) {
        std::copy(vals.begin(), vals.end(), out.begin());
    } else {
        for (int i = 0; i < f.extent[0]; ++i)
            std::copy(vals.begin() + static_cast<std::size_t>(i) * f.extent[1],
                      vals.begin() + static_cast<std::size_t>(i + 1) * f.extent[1],
                      out.begin() + static_cast<std::size_t>(i) * dims[1]);
    }
    return out;
}

inline std::vector<double> crop(const GridFunction& f, const std::vector<double>& vals,
                                const std::vector<int>& dims) {
    std::vector<double> out(f.size());
    if (f.d == 1) {
        std::copy(vals.begin(), vals.begin() + f.extent[0], out.begin());
    } else {
        for (int i = 0; i < f.extent[0]; ++i)
            std::copy(vals.begin() + static_cast<std::size_t>(i) * dims[1],
                      vals.begin() + static_cast<std::size_t>(i) * dims[1] + f.extent[1],
                      out.begin() + static_cast<std::size_t>(i) * f.extent[1]);
    }
    return out;
}

} // namespace detail

// Convolution with the index-beta stable kernel at elapsed `time` on the
// grid of f (single layer). Core of both semigroup applications.
inline GridFunction convolve_stable(const GridFunction& f, double beta, double time,
                                    const ExtendOptions& opt = {}) {
    f.validate();
    if (f.d > 2) throw std::domain_error("convolve_stable: d must be 1 or 2");
    if (!(time > 0.0)) throw std::domain_error("convolve_stable: time must be > 0");
    detail::PaddedLayout lay =
        detail::plan_padding(f, beta, time, f.l1(), f.max_abs(), opt);
    std::vector<double> padded = detail::embed(f, f.values, lay.dims);
    std::vector<double> kernel =
        detail::periodized_kernel(lay.dims, f.spacing, beta, time);
    std::vector<double> conv =
        detail::convolve_periodic(padded, kernel, lay.dims, f.spacing);
    GridFunction out = f;
    out.values = detail::crop(f, conv, lay.dims);
    return out;
}

// Boundary-to-height extension operator: kernel symbol exp(-t |xi|^{alpha/2}).
inline GridFunction extend_grid(const GridFunction& f, const StableParams& p, double t,
                                const ExtendOptions& opt = {}) {
    p.validate();
    if (f.d != p.d) throw std::domain_error("extend_grid: dimension mismatch");
    return convolve_stable(f, 0.5 * p.alpha, t, opt);
}

// Extensions at several heights sharing one padded layout and one forward
// transform of the datum; padding is sized for the largest height (widest
// kernel). Returns one single-layer grid per height.
inline std::vector<GridFunction> extend_many(const GridFunction& f,
                                             const StableParams& p,
                                             const std::vector<double>& heights,
                                             const ExtendOptions& opt = {}) {
    p.validate();
    f.validate();
    if (f.d != p.d) throw std::domain_error("extend_many: dimension mismatch");
    if (f.d > 2) throw std::domain_error("extend_many: d must be 1 or 2");
    if (heights.empty()) return {};
    const double beta = 0.5 * p.alpha;
    double t_max = 0.0;
    for (double t : heights) {
        if (!(t > 0.0)) throw std::domain_error("extend_many: heights must be > 0");
        t_max = std::max(t_max, t);
    }
    const double l1 = f.l1(), linf = f.max_abs();
    detail::PaddedLayout lay = detail::plan_padding(f, beta, t_max, l1, linf, opt);
    std::size_t n = lay.cells();
    std::vector<double> padded = detail::embed(f, f.values, lay.dims);
    std::vector<std::complex<double>> fhat(n);
    for (std::size_t i = 0; i < n; ++i) fhat[i] = padded[i];
    dft_inplace(lay.dims, fhat.data(), FFTW_FORWARD);
    const double scale = std::pow(f.spacing, f.d) / static_cast<double>(n);
    std::vector<GridFunction> out;
    out.reserve(heights.size());
    std::vector<std::complex<double>> work(n);
    for (double t : heights) {
        std::vector<double> kernel =
            detail::periodized_kernel(lay.dims, f.spacing, beta, t);
        for (std::size_t i = 0; i < n; ++i) work[i] = kernel[i];
        dft_inplace(lay.dims, work.data(), FFTW_FORWARD);
        for (std::size_t i = 0; i < n; ++i) work[i] *= fhat[i];
        dft_inplace(lay.dims, work.data(), FFTW_BACKWARD);
        std::vector<double> conv(n);
        for (std::size_t i = 0; i < n; ++i) conv[i] = work[i].real() * scale;
        GridFunction g = f;
        g.values = detail::crop(f, conv, lay.dims);
        out.push_back(std::move(g));
    }
    return out;
}

// Tensor transition operator over the half-space grid: index-alpha stable
// convolution in x, then the vertical Brownian kernel (variance 2s) across
// the stacked heights — image-charge difference when killed at 0 (the
// boundary row maps to zero), plain Gaussian with zero extension below the
// boundary otherwise. `out_rows` selects output heights (empty = all). The
// heights must be uniformly spaced; a vertical kernel narrower than a third
// of the slice step is treated as the identity (error O(s/ht^2)).
inline GridFunction apply_heat_semigroup_product(const GridFunction& f2,
                                                 const StableParams& p, double s,
                                                 bool killed = true,
                                                 std::vector<int> out_rows = {},
                                                 const ExtendOptions& opt = {}) {
    p.validate();
    f2.validate();
    if (f2.t_slices.size() < 2)
        throw std::domain_error("product semigroup: stacked heights required");
    if (!(s > 0.0)) throw std::domain_error("product semigroup: s must be > 0");
    const std::size_t nt = f2.t_slices.size();
    const double ht = f2.t_slices[1] - f2.t_slices[0];
    for (std::size_t k = 1; k < nt; ++k)
        if (std::fabs(f2.t_slices[k] - f2.t_slices[k - 1] - ht) > 1e-9 * ht)
            throw std::domain_error("product semigroup: heights must be uniform");
    if (out_rows.empty()) {
        out_rows.resize(nt);
        for (std::size_t k = 0; k < nt; ++k) out_rows[k] = static_cast<int>(k);
    }

    // horizontal pass (shared layout across slices)
    GridFunction layer = f2;
    layer.t_slices.clear();
    layer.slice_values.clear();
    double l1 = 0.0, linf = 0.0;
    for (const auto& sv : f2.slice_values) {
        double a = 0.0, m = 0.0;
        for (double v : sv) { a += std::fabs(v); m = std::max(m, std::fabs(v)); }
        l1 = std::max(l1, a * std::pow(f2.spacing, f2.d));
        linf = std::max(linf, m);
    }
    detail::PaddedLayout lay = detail::plan_padding(layer, p.alpha, s, l1, linf, opt);
    std::vector<double> kernel =
        detail::periodized_kernel(lay.dims, f2.spacing, p.alpha, s);
    std::vector<std::vector<double>> horiz(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        std::vector<double> padded = detail::embed(layer, f2.slice_values[k], lay.dims);
        std::vector<double> conv =
            detail::convolve_periodic(padded, kernel, lay.dims, f2.spacing);
        horiz[k] = detail::crop(layer, conv, lay.dims);
    }

    // vertical pass
    GridFunction out = layer;
    out.values.clear();
    const std::size_t nx = f2.size();
    const bool resolved = 4.0 * s >= (ht / 3.0) * (ht / 3.0);
    for (int row : out_rows) {
        double ti = f2.t_slices[static_cast<std::size_t>(row)];
        std::vector<double> acc(nx, 0.0);
        if (!resolved) {
            acc = horiz[static_cast<std::size_t>(row)];
            if (killed && ti == 0.0) std::fill(acc.begin(), acc.end(), 0.0);
        } else {
            const double inv = 1.0 / std::sqrt(4.0 * M_PI * s);
            for (std::size_t j = 0; j < nt; ++j) {
                double tj = f2.t_slices[j];
                double w = std::exp(-(ti - tj) * (ti - tj) / (4.0 * s));
                if (killed) w -= std::exp(-(ti + tj) * (ti + tj) / (4.0 * s));
                w *= inv * ht;
                if (w == 0.0) continue;
                const std::vector<double>& src = horiz[j];
                for (std::size_t i = 0; i < nx; ++i) acc[i] += w * src[i];
            }
        }
        out.t_slices.push_back(ti);
        out.slice_values.push_back(std::move(acc));
    }
    return out;
}

} // namespace sbm
