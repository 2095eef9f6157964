#pragma once
// Harmonic (extension) kernel of the product process on the half-space:
//   q_t(x) = int_0^inf p(s, x, 0) mu_t(ds),
// the density of the horizontal position at the vertical absorption time when
// started from height t. Its Fourier transform is exp(-t |xi|^{alpha/2}), so
// q_t is itself an isotropic stable density of index alpha/2 at time t — the
// mixture quadrature and the index-halving identity cross-check one another.
// Self-similarity: q_t(x) = t^{-2d/alpha} q_1(x t^{-2/alpha}).

#include <cmath>

#include "exit_law.hpp"
#include "params.hpp"
#include "quad.hpp"
#include "stable_density.hpp"

namespace sbm {

// Mixture route (definition): quadrature of p(s, r) against mu_t(ds) in
// logarithmic s with analytic tail bounds.
inline double harmonic_kernel(const StableParams& p, double t, double r,
                              double tol = 1e-8) {
    p.validate();
    if (!(t > 0.0)) throw std::domain_error("harmonic_kernel: t must be > 0");
    if (r < 0.0) throw std::domain_error("harmonic_kernel: radius must be >= 0");
    // mu_t lives on s ~ t^2; p(s,r) <= C s^{-d/alpha}. Integrate s in
    // [s_lo, s_hi]: left end killed by exp(-t^2/4s) against the s^{-d/alpha}
    // growth, right end by the s^{-3/2} tail of mu against p <= p(s,0).
    double s_lo = t * t / 138.0; // exp(-t^2/4s) ~ e^-34.5 there
    double s_hi = t * t;
    auto right_tail = [&](double s) {
        // int_s^inf mu_t(du) p(u,0) <= p(s,0) * mu_t((s,inf)) = p(s,0) erf(t/2 sqrt s)
        return stable_density_at_origin(p, s) * std::erf(t / (2.0 * std::sqrt(s)));
    };
    while (right_tail(s_hi) > 0.125 * tol && s_hi < 1e280) s_hi *= 2.0;
    // left end: mu(u) p(u,0) is increasing on (0, s_lo], so the piece is
    // bounded by s_lo * mu(s_lo) p(s_lo, 0)
    while (s_lo > 1e-290 &&
           s_lo * exit_density_mu(t, s_lo) * stable_density_at_origin(p, s_lo) >
               0.125 * tol)
        s_lo *= 0.5;
    double inner_tol = tol * 1e-2;
    Integrand f = [&, inner_tol](double v) {
        double s = std::exp(v);
        return s * exit_density_mu(t, s) * stable_density_info(p, s, r, inner_tol).value;
    };
    QuadResult q = integrate_gk(f, std::log(s_lo), std::log(s_hi), 0.25 * tol, 15);
    return q.value;
}

// Fast route: q_t is the index-alpha/2 stable density at time t.
inline double harmonic_kernel_fast(const StableParams& p, double t, double r,
                                   double tol = 1e-10) {
    p.validate();
    StableParams half{p.d, 0.5 * p.alpha};
    return stable_density_info(half, t, r, tol).value;
}

// Profile-backed evaluator for bulk use (extensions, sampled kernels):
// q_t(r) = t^{-2d/alpha} profile_{alpha/2}(r t^{-2/alpha}).
class HarmonicKernelEvaluator {
  public:
    explicit HarmonicKernelEvaluator(const StableParams& p)
        : p_(p), prof_(get_profile(p.d, 0.5 * p.alpha)) {
        p_.validate();
    }
    double operator()(double t, double r) const { return prof_.density(t, r); }
    double spread(double t) const { return std::pow(t, 2.0 / p_.alpha); }
    double tail_mass(double t, double R) const { return prof_.tail_mass(R / spread(t)); }
    double pointwise_tail(double t, double R) const {
        // first-order asymptote q_t(R) ~ t c(d, alpha/2) R^{-d-alpha/2}
        return t * prof_.tail_constant() * std::pow(R, -(p_.d + 0.5 * p_.alpha));
    }
    const StableParams& params() const { return p_; }

  private:
    StableParams p_;
    const StableProfile& prof_;
};

} // namespace sbm
