#pragma once
// Nonlocal quadratic-variation density of a sampled layer f on the line:
//   Gamma(x) = (c/2) * integral of [f(x+h)-f(x)]^2 |h|^{-1-alpha} dh,
// the square operator (1/2)[L(f^2) - 2 f Lf] of the jump generator. The
// h-integral is split at the lattice scale: a quadratic Taylor model inside
// |h| < spacing (difference^2 ~ f'^2 h^2 keeps the singularity integrable)
// and exact per-cell kernel integrals against midpoint squared differences
// outside. The sum is truncated at the window edge; the kernel mass beyond
// it feeds a worst-case model-error estimate, checked against the
// truncation tolerance. An optional cut radius restricts the integral to
// |h| < cut (the parabolic region of the truncated square function).

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "params.hpp"
#include "quad.hpp"

namespace sbm {

struct CarreOptions {
    std::optional<double> cut_radius;    // integrate only |h| < cut_radius
    double truncation_tol = HUGE_VAL;    // ceiling for the off-window model error
};

namespace detail {

// Kernel integral over (lo, hi) for the |h|^{-1-alpha} density (one side).
inline double kernel_cell(double lo, double hi, double alpha) {
    if (!(hi > lo)) return 0.0;
    return (std::pow(lo, -alpha) - std::pow(hi, -alpha)) / alpha;
}

// Per-offset kernel cell masses for one side of the lattice, plus the Taylor
// coefficient for the inner region |h| < min(spacing, cut): w[j] integrates
// the kernel over cell j ((spacing, 1.5 spacing) for j = 1, else the centered
// cell), clipped at the cut radius.
struct CarreCellWeights {
    std::vector<double> w; // index = offset in cells; w[0] unused
    double inner = 0.0;    // multiplies the squared slope
};

inline CarreCellWeights carre_cells(double alpha, double sp, int n, double cut) {
    CarreCellWeights c;
    c.w.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 1; j < n; ++j) {
        double lo = (j == 1 ? 1.0 : j - 0.5) * sp;
        double hi = (j + 0.5) * sp;
        c.w[static_cast<std::size_t>(j)] =
            kernel_cell(std::min(lo, cut), std::min(hi, cut), alpha);
    }
    c.inner = 2.0 * std::pow(std::min(sp, cut), 2.0 - alpha) / (2.0 - alpha);
    return c;
}

// Kernel mass of the first off-window cell onward (zero-extension tail) when
// the last admissible in-window offset is `reach`.
inline double carre_tail(double alpha, double sp, int reach, double cut) {
    int jout = reach + 1;
    double lo = (jout == 1 ? 1.0 : jout - 0.5) * sp;
    return kernel_cell(std::min(lo, cut), cut, alpha);
}

} // namespace detail

inline GridFunction carre_du_champ(const GridFunction& f, const StableParams& p,
                                   const CarreOptions& opt = {}) {
    p.validate();
    f.validate();
    if (p.d != 1 || f.d != 1)
        throw std::domain_error("carre_du_champ: one-dimensional layers only");
    if (!f.t_slices.empty())
        throw std::domain_error("carre_du_champ: single layer required");
    const double sp = f.spacing;
    const double cut = opt.cut_radius ? *opt.cut_radius : HUGE_VAL;
    if (cut <= 0.0) throw std::domain_error("carre_du_champ: cut radius must be > 0");
    const int n = f.extent[0];
    const double half_c = 0.5 * levy_constant(1, p.alpha);

    const detail::CarreCellWeights cells =
        detail::carre_cells(p.alpha, sp, n, cut);
    const std::vector<double>& w = cells.w;
    const double inner = cells.inner;

    GridFunction out = f;
    const double e_edge = std::max(std::fabs(f.values.front()),
                                   std::fabs(f.values.back()));
    double worst_model_err = 0.0;
    for (int i = 0; i < n; ++i) {
        const double fx = f.values[static_cast<std::size_t>(i)];
        double slope;
        if (i == 0)
            slope = (f.values[1] - f.values[0]) / sp;
        else if (i == n - 1)
            slope = (f.values[static_cast<std::size_t>(n - 1)] -
                     f.values[static_cast<std::size_t>(n - 2)]) /
                    sp;
        else
            slope = (f.values[static_cast<std::size_t>(i + 1)] -
                     f.values[static_cast<std::size_t>(i - 1)]) /
                    (2.0 * sp);
        double acc = inner * slope * slope;
        double tail_mass = 0.0; // kernel mass beyond the window
        for (int sign : {-1, 1}) {
            int reach = sign < 0 ? i : n - 1 - i; // last in-window offset
            for (int j = 1; j <= reach; ++j) {
                double d = f.values[static_cast<std::size_t>(i + sign * j)] - fx;
                acc += w[static_cast<std::size_t>(j)] * d * d;
            }
            tail_mass += detail::carre_tail(p.alpha, sp, reach, cut);
        }
        out.values[static_cast<std::size_t>(i)] = half_c * acc;
        // worst case for the omitted tail: |f - fx| <= |fx| + edge magnitude
        double miss = std::fabs(fx) + e_edge;
        worst_model_err =
            std::max(worst_model_err, half_c * tail_mass * miss * miss);
    }
    if (worst_model_err > opt.truncation_tol)
        throw ToleranceError("window truncation error estimate " +
                                 std::to_string(worst_model_err) +
                                 " exceeds tolerance " +
                                 std::to_string(opt.truncation_tol),
                             worst_model_err);
    return out;
}

} // namespace sbm
