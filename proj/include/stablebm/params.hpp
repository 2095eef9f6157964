#pragma once
// Basic parameter and point types for the product process: a rotationally
// symmetric stable process Y on R^d (characteristic function exp(-t|xi|^alpha))
// times a one-dimensional Brownian motion Z with generator d^2/dt^2, living on
// the upper half-space R^d x (0, inf) and absorbed when Z reaches 0.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbm {

struct StableParams {
    int d = 1;          // horizontal dimension, >= 1
    double alpha = 1.0; // stability index, in (0, 2)

    void validate() const {
        if (d < 1)
            throw std::domain_error("params: d must be >= 1, got " + std::to_string(d));
        if (!(alpha > 0.0) || !(alpha < 2.0))
            throw std::domain_error("params: alpha must lie in (0,2), got " + std::to_string(alpha));
    }
};

// A point (x, t) of the closed half-space, t >= 0.
struct SpaceTimePoint {
    std::vector<double> x; // horizontal coordinates, size d
    double t = 0.0;        // vertical coordinate (distance to the boundary)
};

inline SpaceTimePoint make_point(std::vector<double> x, double t) {
    return SpaceTimePoint{std::move(x), t};
}

// Surface area of the unit sphere in R^d.
inline double unit_sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

// Normalizing constant of the jump kernel nu(du) = c(d,alpha) |u|^{-d-alpha} du
// that matches the characteristic function exp(-t|xi|^alpha):
//   c(d,alpha) = alpha 2^{alpha-1} Gamma((d+alpha)/2) / (pi^{d/2} Gamma(1-alpha/2)).
// For (d,alpha) = (1,1) this is 1/pi, for (2,1) it is 1/(2 pi).
inline double levy_constant(int d, double alpha) {
    if (d < 1 || !(alpha > 0.0) || !(alpha < 2.0))
        throw std::domain_error("levy_constant: need d >= 1 and alpha in (0,2)");
    return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (d + alpha)) /
           (std::pow(M_PI, 0.5 * d) * std::tgamma(1.0 - 0.5 * alpha));
}

// Total jump rate beyond radius R: c(d,alpha) * int_{|u|>R} |u|^{-d-alpha} du.
inline double jump_rate_beyond(int d, double alpha, double R) {
    if (!(R > 0.0)) throw std::domain_error("jump_rate_beyond: R must be > 0");
    return levy_constant(d, alpha) * unit_sphere_area(d) * std::pow(R, -alpha) / alpha;
}

} // namespace sbm
