#pragma once
// Discrete centered Hardy-Littlewood maximal function over lattice balls of
// dyadic radii, lattice L^p norms, and the fitted constant for pointwise
// domination of harmonic-extension layers by the maximal function.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "grid_ops.hpp"
#include "params.hpp"

namespace sbm {

// (spacing^d * sum |g|^p)^{1/p}; a stacked grid is reduced over all slices
// with the slice step as the extra measure factor.
inline double lp_norm(const GridFunction& g, double p) {
    g.validate();
    if (!(p > 0.0)) throw std::domain_error("lp_norm: p must be positive");
    double cell = std::pow(g.spacing, g.d);
    double acc = 0.0;
    if (g.t_slices.empty()) {
        for (double v : g.values) acc += std::pow(std::fabs(v), p);
        acc *= cell;
    } else {
        double ht = g.t_slices.size() > 1 ? g.t_slices[1] - g.t_slices[0] : 1.0;
        for (const auto& sl : g.slice_values)
            for (double v : sl) acc += std::pow(std::fabs(v), p);
        acc *= cell * ht;
    }
    return std::pow(acc, 1.0 / p);
}

namespace detail {

inline std::vector<int> dyadic_radii(int span) {
    std::vector<int> radii{0};
    for (int r = 1; r <= span; r *= 2) radii.push_back(r);
    return radii;
}

} // namespace detail

// Mf(x) = max over dyadic radii r (including 0) of the average of |f| over
// the lattice ball |y - x| <= r h, with f extended by zero off the window and
// the average normalized by the full ball cardinality.
inline GridFunction maximal_function(const GridFunction& f) {
    f.validate();
    if (!f.t_slices.empty())
        throw std::domain_error("maximal_function: single layer required");
    GridFunction out = f;
    if (f.d == 1) {
        const int n = f.extent[0];
        std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
        for (int i = 0; i < n; ++i)
            prefix[static_cast<std::size_t>(i) + 1] =
                prefix[static_cast<std::size_t>(i)] +
                std::fabs(f.values[static_cast<std::size_t>(i)]);
        auto radii = detail::dyadic_radii(n - 1);
        for (int i = 0; i < n; ++i) {
            // radius 0 taken exactly, larger radii via the prefix sums
            double best = std::fabs(f.values[static_cast<std::size_t>(i)]);
            for (int r : radii) {
                if (r == 0) continue;
                int lo = std::max(0, i - r), hi = std::min(n - 1, i + r);
                double s = prefix[static_cast<std::size_t>(hi) + 1] -
                           prefix[static_cast<std::size_t>(lo)];
                best = std::max(best, s / (2.0 * r + 1.0));
            }
            out.values[static_cast<std::size_t>(i)] = best;
        }
        return out;
    }
    if (f.d == 2) {
        const int nx = f.extent[0], ny = f.extent[1];
        auto radii = detail::dyadic_radii(std::max(nx, ny) - 1);
        // offsets and cardinality of each Euclidean index ball
        std::vector<std::vector<std::pair<int, int>>> balls;
        std::vector<double> card;
        for (int r : radii) {
            std::vector<std::pair<int, int>> b;
            for (int a = -r; a <= r; ++a)
                for (int c = -r; c <= r; ++c)
                    if (a * a + c * c <= r * r) b.emplace_back(a, c);
            card.push_back(static_cast<double>(b.size()));
            balls.push_back(std::move(b));
        }
        for (int ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < ny; ++iy) {
                double best = std::fabs(
                    f.values[static_cast<std::size_t>(ix) *
                                 static_cast<std::size_t>(ny) +
                             static_cast<std::size_t>(iy)]);
                for (std::size_t k = 1; k < balls.size(); ++k) {
                    double s = 0.0;
                    for (auto [a, c] : balls[k]) {
                        int jx = ix + a, jy = iy + c;
                        if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
                        s += std::fabs(
                            f.values[static_cast<std::size_t>(jx) *
                                         static_cast<std::size_t>(ny) +
                                     static_cast<std::size_t>(jy)]);
                    }
                    best = std::max(best, s / card[k]);
                }
                out.values[static_cast<std::size_t>(ix) *
                               static_cast<std::size_t>(ny) +
                           static_cast<std::size_t>(iy)] = best;
            }
        return out;
    }
    throw std::domain_error("maximal_function: d <= 2 supported");
}

struct DominationFit {
    double c_hat = 0.0;   // smallest constant with layer <= c_hat * Mf observed
    double worst_t = 0.0; // height where the ratio peaks
};

// Fits sup_{x,t} (extension layer at t)(x) / Mf(x) over the given heights.
inline DominationFit extension_domination(const GridFunction& f,
                                          const StableParams& p,
                                          const std::vector<double>& heights,
                                          const ExtendOptions& eopt = {}) {
    GridFunction mf = maximal_function(f);
    auto slices = extend_many(f, p, heights, eopt);
    DominationFit fit;
    for (std::size_t k = 0; k < slices.size(); ++k) {
        for (std::size_t i = 0; i < mf.values.size(); ++i) {
            if (!(mf.values[i] > 0.0)) continue;
            double r = slices[k].values[i] / mf.values[i];
            if (r > fit.c_hat) {
                fit.c_hat = r;
                fit.worst_t = heights[k];
            }
        }
    }
    return fit;
}

} // namespace sbm
