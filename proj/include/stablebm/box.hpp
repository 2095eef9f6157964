#pragma once
// Axis-aligned boxes matched to the two scaling exponents of the product
// process: horizontal side r^{2/alpha} per coordinate, vertical side r.
//   D_r(center) = prod_i (c_i - hw, c_i + hw) x (c_t - r/2, c_t + r/2),
//   hw = r^{2/alpha}/2.
// The interior-margin variant shrinks the horizontal half-width by the factor
// (1 - eps^{2/alpha}) and the vertical one to (1-eps) r/2. A horizontal
// stretch factor is provided for control experiments that need an effectively
// unbounded horizontal extent (vertical-only exit oracles).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "params.hpp"

namespace sbm {

// Violated geometric hypothesis (box leaves the half-space, start outside the
// prescribed region, target not inside its container, ...).
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

struct AnisotropicBox {
    SpaceTimePoint center;
    double r = 1.0;
    double epsilon = 0.0;            // interior margin in [0,1); 0 = none
    double horizontal_stretch = 1.0; // >1 widens the horizontal faces only

    void validate(int d) const {
        if (!(r > 0.0)) throw std::domain_error("box: r must be > 0");
        if (!(epsilon >= 0.0 && epsilon < 1.0))
            throw std::domain_error("box: margin must lie in [0,1)");
        if (!(horizontal_stretch > 0.0))
            throw std::domain_error("box: stretch must be > 0");
        if (static_cast<int>(center.x.size()) != d)
            throw std::domain_error("box: center has dimension " +
                                    std::to_string(center.x.size()) + ", expected " +
                                    std::to_string(d));
    }

    double horizontal_half_width(double alpha) const {
        double hw = 0.5 * std::pow(r, 2.0 / alpha) * horizontal_stretch;
        if (epsilon > 0.0) hw *= 1.0 - std::pow(epsilon, 2.0 / alpha);
        return hw;
    }
    double vertical_half_width() const {
        return 0.5 * r * (epsilon > 0.0 ? 1.0 - epsilon : 1.0);
    }
    double bottom() const { return center.t - vertical_half_width(); }
    double top() const { return center.t + vertical_half_width(); }

    // Containment in the closed upper half-space uses the unshrunk height.
    bool in_half_space() const { return center.t - 0.5 * r >= 0.0; }

    bool contains(const double* x, double t, double alpha) const {
        double hw = horizontal_half_width(alpha);
        for (std::size_t i = 0; i < center.x.size(); ++i)
            if (std::fabs(x[i] - center.x[i]) > hw) return false;
        return std::fabs(t - center.t) <= vertical_half_width();
    }
    bool contains(const SpaceTimePoint& p, double alpha) const {
        return contains(p.x.data(), p.t, alpha);
    }
    // Open-interior membership (strict inequalities).
    bool contains_interior(const double* x, double t, double alpha) const {
        double hw = horizontal_half_width(alpha);
        for (std::size_t i = 0; i < center.x.size(); ++i)
            if (!(std::fabs(x[i] - center.x[i]) < hw)) return false;
        return std::fabs(t - center.t) < vertical_half_width();
    }

    // Same center and margin, scaled reference radius.
    AnisotropicBox scaled(double factor) const {
        return AnisotropicBox{center, r * factor, epsilon, horizontal_stretch};
    }

    double measure(int d, double alpha) const {
        return std::pow(2.0 * horizontal_half_width(alpha), d) *
               (2.0 * vertical_half_width());
    }
};

// Compact target region assembled from boxes: union of `include` minus the
// open interiors of `exclude` (so a box-minus-box ring keeps its inner face).
// Measure assumes the include boxes are disjoint and every exclude box lies
// inside the union, which the shape builders guarantee.
struct TargetSet {
    std::vector<AnisotropicBox> include;
    std::vector<AnisotropicBox> exclude;

    bool contains(const double* x, double t, double alpha) const {
        bool in = false;
        for (const auto& b : include)
            if (b.contains(x, t, alpha)) { in = true; break; }
        if (!in) return false;
        for (const auto& b : exclude)
            if (b.contains_interior(x, t, alpha)) return false;
        return true;
    }
    bool contains(const SpaceTimePoint& p, double alpha) const {
        return contains(p.x.data(), p.t, alpha);
    }

    double measure(int d, double alpha) const {
        double m = 0.0;
        for (const auto& b : include) m += b.measure(d, alpha);
        for (const auto& b : exclude) m -= b.measure(d, alpha);
        return m;
    }

    // Every member box inside `container`?
    bool inside(const AnisotropicBox& container, double alpha) const {
        double hw = container.horizontal_half_width(alpha);
        for (const auto& b : include) {
            double bw = b.horizontal_half_width(alpha);
            for (std::size_t i = 0; i < b.center.x.size(); ++i)
                if (std::fabs(b.center.x[i] - container.center.x[i]) + bw > hw)
                    return false;
            if (b.bottom() < container.bottom() || b.top() > container.top())
                return false;
        }
        return true;
    }
};

} // namespace sbm
