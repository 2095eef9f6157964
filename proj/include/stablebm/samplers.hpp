#pragma once
// Exact-in-law increment samplers.
//
// The horizontal stable increment over a step dt is produced by Gaussian
// subordination: draw S with Laplace transform E exp(-lambda S) =
// exp(-dt lambda^{alpha/2}) and set  dY = sqrt(2 S) N  with N a standard
// d-dim Gaussian; then E exp(i xi.dY) = exp(-dt |xi|^alpha), matching the
// Brownian convention (generator Laplacian, vertical variance 2 dt).

#include <cmath>

#include "params.hpp"
#include "rng.hpp"

namespace sbm {

// One-sided beta-stable increment, beta in (0,1):
// E exp(-lambda S) = exp(-dt lambda^beta).   Kanter's representation:
//   S = dt^{1/beta} * (A(theta)/W)^{(1-beta)/beta},  theta ~ U(0,pi), W ~ Exp(1),
//   A(theta) = sin((1-beta) theta) sin(beta theta)^{beta/(1-beta)} / sin(theta)^{1/(1-beta)}.
inline double sample_subordinator_increment(double beta, double dt, RngStream& rng) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("subordinator: beta must lie in (0,1)");
    if (!(dt > 0.0)) throw std::domain_error("subordinator: dt must be > 0");
    double theta = M_PI * rng.next_open() * (1.0 - 1e-16); // open (0, pi)
    double w = rng.next_exp();
    if (w < 1e-300) w = 1e-300;
    double om = 1.0 - beta;
    double log_a = std::log(std::sin(om * theta)) +
                   (beta / om) * std::log(std::sin(beta * theta)) -
                   (1.0 / om) * std::log(std::sin(theta));
    double log_s = std::log(dt) / beta + (om / beta) * (log_a - std::log(w));
    return std::exp(log_s); // may overflow to +inf with vanishing probability
}

// Rotationally symmetric alpha-stable increment over dt:
// writes d coordinates into out; returns the subordinator draw used.
inline double sample_stable_increment(const StableParams& p, double dt, RngStream& rng,
                                      double* out) {
    p.validate();
    double s = sample_subordinator_increment(0.5 * p.alpha, dt, rng);
    double scale = std::sqrt(2.0 * s);
    rng.fill_gaussian(out, p.d);
    for (int i = 0; i < p.d; ++i) out[i] *= scale;
    return s;
}

// Vertical Brownian increment: N(0, 2 dt) (generator d^2/dt^2).
inline double sample_brownian_increment(double dt, RngStream& rng) {
    if (!(dt > 0.0)) throw std::domain_error("brownian: dt must be > 0");
    return std::sqrt(2.0 * dt) * rng.next_gaussian();
}

} // namespace sbm
