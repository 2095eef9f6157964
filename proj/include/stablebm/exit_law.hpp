#pragma once
// Law of the absorption time T_0 of the vertical Brownian motion (generator
// d^2/dt^2) started at height t:
//   mu_t(ds) = t/(2 sqrt(pi)) exp(-t^2/(4s)) s^{-3/2} ds on (0, inf),
// with closed-form distribution function erfc(t / (2 sqrt(S))).

#include <cmath>

#include "quad.hpp"

namespace sbm {

inline double exit_density_mu(double t, double s) {
    if (!(t > 0.0)) throw std::domain_error("exit_density_mu: t must be > 0");
    if (s <= 0.0) return 0.0;
    double e = t * t / (4.0 * s);
    if (e > 690.0) return 0.0;
    return t / (2.0 * std::sqrt(M_PI)) * std::exp(-e) * std::pow(s, -1.5);
}

// closed form, used as the reference throughout
inline double exit_cdf_mu(double t, double S) {
    if (!(t > 0.0)) throw std::domain_error("exit_cdf_mu: t must be > 0");
    if (S <= 0.0) return 0.0;
    return std::erfc(t / (2.0 * std::sqrt(S)));
}

// quadrature route for the distribution function (independent of the closed
// form; substitutes s = t^2/(4 w^2) to remove both endpoint difficulties)
inline double exit_cdf_mu_quad(double t, double S, double tol = 1e-12) {
    if (!(t > 0.0)) throw std::domain_error("exit_cdf_mu_quad: t must be > 0");
    if (S <= 0.0) return 0.0;
    // int_0^S mu_t(s) ds = (2/sqrt(pi)) int_{t/(2 sqrt(S))}^inf exp(-w^2) dw
    double w0 = t / (2.0 * std::sqrt(S));
    Integrand f = [](double w) { return 2.0 / std::sqrt(M_PI) * std::exp(-w * w); };
    double hi = w0 + 9.0; // remaining tail < exp(-81), far below any tolerance
    return integrate_gk(f, w0, hi, tol).value;
}

// total mass by quadrature of the density: the head directly, the algebraic
// tail folded onto a finite smooth integral by s -> 1/w^2
inline double exit_mass_mu_quad(double t, double tol = 1e-12) {
    Integrand head = [=](double s) { return exit_density_mu(t, s); };
    double mode = t * t / 6.0;
    QuadResult left = integrate_ts(head, 0.0, mode, tol);
    // int_mode^inf mu_t(s) ds = (t / sqrt(pi)) int_0^{1/sqrt(mode)} exp(-(t w / 2)^2) dw
    Integrand tail = [=](double w) {
        return t / std::sqrt(M_PI) * std::exp(-0.25 * t * t * w * w);
    };
    QuadResult right = integrate_gk(tail, 0.0, 1.0 / std::sqrt(mode), tol);
    return left.value + right.value;
}

} // namespace sbm
