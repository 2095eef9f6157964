#pragma once
// Uniform-lattice function over R^d with equal spacing per axis, optionally
// stacked over an ascending list of heights (one value array per height) for
// data living on the half-space.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbm {

struct GridFunction {
    int d = 1;
    std::vector<double> origin; // coordinate of lattice index 0, per axis
    double spacing = 1.0;
    std::vector<int> extent;    // lattice sizes, length d; row-major values,
    std::vector<double> values; // last axis fastest

    std::vector<double> t_slices; // optional heights, strictly ascending
    std::vector<std::vector<double>> slice_values; // one lattice per height

    static GridFunction zeros(int d, std::vector<int> extent, double spacing,
                              std::vector<double> origin) {
        GridFunction g;
        g.d = d;
        g.extent = std::move(extent);
        g.spacing = spacing;
        g.origin = std::move(origin);
        g.values.assign(g.size(), 0.0);
        g.validate();
        return g;
    }

    // Symmetric window [-half, half]^d with n cells per axis, cell-centered.
    static GridFunction centered(int d, int n, double spacing) {
        std::vector<double> org(d, -0.5 * spacing * (n - 1));
        return zeros(d, std::vector<int>(d, n), spacing, org);
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int e : extent) s *= static_cast<std::size_t>(e);
        return s;
    }

    void validate() const {
        if (d < 1 || static_cast<int>(extent.size()) != d ||
            static_cast<int>(origin.size()) != d)
            throw std::invalid_argument("grid: extent/origin must have length d");
        if (!(spacing > 0.0)) throw std::invalid_argument("grid: spacing must be > 0");
        for (int e : extent)
            if (e < 1) throw std::invalid_argument("grid: extent entries must be >= 1");
        if (t_slices.empty()) {
            if (values.size() != size())
                throw std::invalid_argument("grid: value count does not match extent");
        } else {
            if (slice_values.size() != t_slices.size())
                throw std::invalid_argument("grid: one value array per height required");
            for (std::size_t k = 1; k < t_slices.size(); ++k)
                if (!(t_slices[k] > t_slices[k - 1]))
                    throw std::invalid_argument("grid: heights must be ascending");
            for (const auto& sv : slice_values)
                if (sv.size() != size())
                    throw std::invalid_argument("grid: slice shape mismatch");
        }
    }

    double coordinate(int axis, int i) const { return origin[axis] + spacing * i; }

    std::size_t index(const int* idx) const {
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a) flat = flat * extent[a] + idx[a];
        return flat;
    }

    double& at(int i) { return values[static_cast<std::size_t>(i)]; }
    double at(int i) const { return values[static_cast<std::size_t>(i)]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * extent[1] + j]; }
    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * extent[1] + j];
    }

    // Riemann mass h^d sum over the single-layer values.
    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * std::pow(spacing, d);
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::fabs(v));
        return m;
    }
    double l1() const {
        double s = 0.0;
        for (double v : values) s += std::fabs(v);
        return s * std::pow(spacing, d);
    }

    bool is_probability(double tol = 1e-6) const {
        for (double v : values)
            if (v < 0.0) return false;
        return std::fabs(mass() - 1.0) <= tol;
    }

    // Fill the single layer from a callback on cell-center coordinates.
    void fill(const std::function<double(const double*)>& f) {
        std::vector<int> idx(d, 0);
        std::vector<double> xy(d);
        for (std::size_t flat = 0; flat < values.size(); ++flat) {
            for (int a = 0; a < d; ++a) xy[a] = coordinate(a, idx[a]);
            values[flat] = f(xy.data());
            for (int a = d - 1; a >= 0; --a) {
                if (++idx[a] < extent[a]) break;
                idx[a] = 0;
            }
        }
    }

    // Multilinear interpolation of an arbitrary value array laid out on this
    // lattice (the single layer, or one stacked slice), zero outside.
    double interpolate_values(const std::vector<double>& vals, const double* x) const {
        double w[3][2];
        int base[3];
        if (d > 3) throw std::domain_error("grid: interpolation supports d <= 3");
        for (int a = 0; a < d; ++a) {
            double fi = (x[a] - origin[a]) / spacing;
            int i0 = static_cast<int>(std::floor(fi));
            double t = fi - i0;
            if (fi < -1.0 || fi > extent[a]) return 0.0;
            base[a] = i0;
            w[a][0] = 1.0 - t;
            w[a][1] = t;
        }
        double acc = 0.0;
        int corners = 1 << d;
        std::vector<int> idx(d);
        for (int c = 0; c < corners; ++c) {
            double wt = 1.0;
            bool ok = true;
            for (int a = 0; a < d; ++a) {
                int i = base[a] + ((c >> a) & 1);
                if (i < 0 || i >= extent[a]) { ok = false; break; }
                idx[a] = i;
                wt *= w[a][(c >> a) & 1];
            }
            if (ok && wt != 0.0) acc += wt * vals[index(idx.data())];
        }
        return acc;
    }

    // Multilinear interpolation of the single layer, zero outside the window.
    double interpolate(const double* x) const { return interpolate_values(values, x); }
};

} // namespace sbm
