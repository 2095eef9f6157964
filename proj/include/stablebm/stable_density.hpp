#pragma once
// Transition density p(s, x, y) = p(s, |x-y|) of the isotropic stable process
// with characteristic function exp(-s |xi|^alpha).
//
// Two independent evaluation routes:
//  * stable_density        - radial Fourier inversion (Hankel-reduced). For
//    alpha <= 1 the contour is rotated onto the imaginary axis, turning the
//    Bessel oscillation into an exponentially damped Macdonald-function
//    integrand; for alpha > 1 the real-axis integral is summed half-wave by
//    half-wave. Small radii use the ascending moment series.
//  * stable_density_mixture - Gaussian mixture over the one-sided alpha/2
//    subordinator, whose density is evaluated by its own Laplace-inversion
//    (Pollard) integral. Shares nothing with the route above past elementary
//    functions, so the two serve as mutual cross-checks.

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "params.hpp"
#include "quad.hpp"

namespace sbm {

// p(s, 0): (2 pi)^{-d} * area(S^{d-1}) * Gamma(d/alpha) / (alpha s^{d/alpha}).
inline double stable_density_at_origin(const StableParams& p, double s) {
    p.validate();
    if (!(s > 0.0)) throw std::domain_error("stable_density: s must be > 0");
    return std::pow(2.0 * M_PI, -p.d) * unit_sphere_area(p.d) *
           std::tgamma(p.d / p.alpha) / (p.alpha * std::pow(s, p.d / p.alpha));
}

namespace detail {

// Ascending series p(s,r) = C sum_m (-r^2/4)^m Gamma(d/2)/(m! Gamma(m+d/2))
//                                 * Gamma((2m+d)/alpha) / (alpha s^{(2m+d)/alpha}).
// Convergent for alpha > 1, asymptotic for alpha <= 1; truncated at the
// smallest term. Returns false if the bound cannot meet tol.
inline bool stable_series(const StableParams& p, double s, double r, double tol,
                          QuadResult& out) {
    const double pref = std::pow(2.0 * M_PI, -p.d) * unit_sphere_area(p.d);
    const double lg_d2 = std::lgamma(0.5 * p.d);
    double sum = 0.0, prev_mag = HUGE_VAL;
    for (int m = 0; m <= 14; ++m) {
        double lt = lg_d2 - std::lgamma(m + 1.0) - std::lgamma(m + 0.5 * p.d) +
                    std::lgamma((2.0 * m + p.d) / p.alpha) -
                    ((2.0 * m + p.d) / p.alpha) * std::log(s) +
                    m * std::log(0.25 * r * r);
        double term = pref * std::exp(lt) / p.alpha;
        if (!(term < HUGE_VAL)) return false;
        if (term >= prev_mag) { // divergence onset (asymptotic regime)
            out.value = sum;
            out.abs_err = term;
            out.converged = term <= tol;
            return out.converged;
        }
        sum += (m % 2 == 0 ? term : -term);
        prev_mag = term;
        if (term <= 0.25 * tol && m >= 1) {
            out.value = sum;
            out.abs_err = term;
            out.converged = true;
            return true;
        }
    }
    out.value = sum;
    out.abs_err = prev_mag;
    out.converged = prev_mag <= tol;
    return out.converged;
}

// Macdonald kernel y^{d/2} K_{|d/2-1|}(ry), with the small-argument power law
// substituted analytically to avoid overflow near y = 0.
inline double radial_k_kernel(int d, double r, double y) {
    double z = r * y;
    if (d == 1) return std::exp(-z) * std::sqrt(0.5 * M_PI / r); // y^{1/2} K_{1/2}(ry)
    if (d == 3) return std::exp(-z) * std::sqrt(0.5 * M_PI / r) * y;
    double nu = 0.5 * d - 1.0;
    if (z < 1e-10) {
        if (d == 2) return y * -(std::log(0.5 * z) + 0.5772156649015329);
        return std::pow(y, 0.5 * d - nu) * 0.5 * std::tgamma(nu) * std::pow(2.0 / r, nu);
    }
    return std::pow(y, 0.5 * d) * std::cyl_bessel_k(nu, z);
}

// alpha <= 1, r > 0: rotated-contour representation
// p = (2pi)^{-d/2} r^{1-d/2} (2/pi) int_0^inf K_{d/2-1}(ry) y^{d/2}
//        exp(-a y^alpha) sin(b y^alpha) dy,  a = s cos(pi alpha/2), b = s sin(...).
inline QuadResult rotated_route(const StableParams& p, double s, double r, double tol) {
    const double a = s * std::cos(0.5 * M_PI * p.alpha);
    const double b = s * std::sin(0.5 * M_PI * p.alpha);
    const double pref = (2.0 / M_PI) * std::pow(2.0 * M_PI, -0.5 * p.d) *
                        std::pow(r, 1.0 - 0.5 * p.d);
    const int d = p.d;
    const double alpha = p.alpha;
    Integrand f = [=](double y) {
        if (y <= 0.0) return 0.0;
        double ya = std::pow(y, alpha);
        return pref * radial_k_kernel(d, r, y) * std::exp(-a * ya) * std::sin(b * ya);
    };
    auto nodes = [=](int k) {
        double ln = (std::log((k + 1) * M_PI) - std::log(b)) / alpha;
        return ln > 690.0 ? 1e300 : std::exp(ln);
    };
    return integrate_oscillatory(f, nodes, tol);
}

// alpha > 1: real-axis Hankel integral summed between oscillation nodes.
inline QuadResult real_axis_route(const StableParams& p, double s, double r, double tol) {
    const int d = p.d;
    const double alpha = p.alpha;
    Integrand f;
    if (d == 1) {
        f = [=](double xi) { return std::cos(r * xi) * std::exp(-s * std::pow(xi, alpha)) / M_PI; };
    } else if (d == 2) {
        f = [=](double xi) {
            return xi <= 0.0 ? 0.0
                             : std::cyl_bessel_j(0.0, r * xi) * xi *
                                   std::exp(-s * std::pow(xi, alpha)) / (2.0 * M_PI);
        };
    } else if (d == 3) {
        f = [=](double xi) {
            return xi * std::sin(r * xi) * std::exp(-s * std::pow(xi, alpha)) /
                   (2.0 * M_PI * M_PI * r);
        };
    } else {
        double pref = std::pow(2.0 * M_PI, -0.5 * d) * std::pow(r, 1.0 - 0.5 * d);
        double nu = 0.5 * d - 1.0;
        f = [=](double xi) {
            return xi <= 0.0 ? 0.0
                             : pref * std::cyl_bessel_j(nu, r * xi) *
                                   std::pow(xi, 0.5 * d) * std::exp(-s * std::pow(xi, alpha));
        };
    }
    // panel ends at the oscillation zeros: McMahon j_{nu,k} ~ (k + nu/2 + 3/4) pi,
    // exact for the cos (d=1) and sin (d=3) kernels
    const double shift = 0.25 * d + 0.25;
    auto nodes = [=](int k) { return (k + shift) * M_PI / r; };
    return integrate_oscillatory(f, nodes, tol);
}

} // namespace detail

// Radial Fourier-inversion route with achieved-error report.
inline QuadResult stable_density_info(const StableParams& p, double s, double r,
                                      double tol = 1e-8) {
    p.validate();
    if (!(s > 0.0)) throw std::domain_error("stable_density: s must be > 0, got " +
                                            std::to_string(s));
    if (r < 0.0) throw std::domain_error("stable_density: radius must be >= 0");
    if (r == 0.0) {
        QuadResult q;
        q.value = stable_density_at_origin(p, s);
        q.abs_err = 1e-15 * q.value;
        return q;
    }
    if (r * std::pow(s, -1.0 / p.alpha) <= 0.3) {
        QuadResult q;
        if (detail::stable_series(p, s, r, 0.5 * tol, q)) return q;
    }
    return p.alpha <= 1.0 ? detail::rotated_route(p, s, r, tol)
                          : detail::real_axis_route(p, s, r, tol);
}

inline double stable_density(const StableParams& p, double s, double r,
                             double tol = 1e-8) {
    QuadResult q = stable_density_info(p, s, r, tol);
    if (!q.converged || q.abs_err > std::max(tol, 1e-13 * std::fabs(q.value)) * 4.0)
        throw ToleranceError("stable_density: quadrature tolerance not reached", q.abs_err);
    return q.value;
}

// ---------------------------------------------------------------------------
// One-sided subordinator density and the mixture route.

// Density g_beta(s, u) of the subordinator with E exp(-lambda S) =
// exp(-s lambda^beta), via Pollard's inversion
//   g(1,u) = (1/pi) int_0^inf exp(-u y - y^beta cos(pi beta)) sin(y^beta sin(pi beta)) dy.
inline double subordinator_density(double beta, double s, double u, double tol = 1e-10) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("subordinator_density: beta must lie in (0,1)");
    if (!(s > 0.0)) throw std::domain_error("subordinator_density: s must be > 0");
    if (u <= 0.0) return 0.0;
    double scale = std::pow(s, -1.0 / beta);
    double un = u * scale;
    const double c1 = std::cos(M_PI * beta), s1 = std::sin(M_PI * beta);
    // left-tail largeness Z: log g(un) ~ -Z with Z = A un^{-beta/(1-beta)},
    // A = (1-beta) beta^{beta/(1-beta)}
    const double qexp = beta / (1.0 - beta);
    const double A = (1.0 - beta) * std::pow(beta, qexp);
    const double Z = A * std::pow(un, -qexp);
    if (Z > 690.0) return 0.0; // below double underflow
    // For beta > 1/2 the Pollard integrand has a positive hump of height
    // exp(hump); together with the small answer this sets the cancellation
    // loss. Past ~22 digits-of-e the direct integral is hopeless and the
    // saddle-point form (exact at beta = 1/2) takes over.
    const double hump = c1 < 0.0 ? Z * std::pow(-c1, 1.0 / (1.0 - beta)) : 0.0;
    if (Z + hump > 22.0) {
        double log_sstar = std::log(beta / un) / (1.0 - beta);
        double corr = (beta - 2.0) * (1.0 - 2.0 * beta) / (24.0 * beta * Z);
        double lg = -0.5 * std::log(2.0 * M_PI * beta * (1.0 - beta)) +
                    (1.0 - 0.5 * beta) * log_sstar - Z + std::log1p(corr);
        return lg < -690.0 ? 0.0 : std::exp(lg) * scale;
    }
    Integrand f = [=](double y) {
        if (y <= 0.0) return 0.0;
        double yb = std::pow(y, beta);
        double ex = -un * y - yb * c1; // bounded by the hump check above
        return std::exp(ex) * std::sin(s1 * yb) / M_PI;
    };
    auto nodes = [=](int k) {
        double ln = (std::log((k + 1) * M_PI) - std::log(s1)) / beta;
        return ln > 690.0 ? 1e300 : std::exp(ln);
    };
    QuadResult q = integrate_oscillatory(f, nodes, tol, 400000);
    return std::max(0.0, q.value) * scale;
}

// Gaussian mixture over the alpha/2 subordinator:
// p(s, r) = int_0^inf (4 pi u)^{-d/2} exp(-r^2/(4u)) g_{alpha/2}(s, u) du.
inline double stable_density_mixture(const StableParams& p, double s, double r,
                                     double tol = 1e-8) {
    p.validate();
    if (!(s > 0.0)) throw std::domain_error("stable_density_mixture: s must be > 0");
    const double beta = 0.5 * p.alpha;
    const double A = (1.0 - beta) * std::pow(beta, beta / (1.0 - beta));
    double u_scale = std::pow(s, 1.0 / beta);
    double u_lo = u_scale * std::pow(A / 690.0, (1.0 - beta) / beta);
    if (r > 0.0) u_lo = std::max(u_lo, r * r / 2800.0);
    // grow u_hi until the analytic right-tail bound is negligible
    double u_hi = std::max({4.0 * u_scale, r * r, 1.0});
    auto tail_bound = [&](double u) {
        return 2.0 * std::pow(4.0 * M_PI * u, -0.5 * p.d) * s * std::pow(u, -beta) /
               std::tgamma(1.0 - beta);
    };
    while (tail_bound(u_hi) > 0.125 * tol && u_hi < 1e280) u_hi *= 2.0;
    const int d = p.d;
    double inner_tol = tol * 3e-3;
    Integrand g = [=](double v) {
        double u = std::exp(v);
        double gauss = std::pow(4.0 * M_PI * u, -0.5 * d);
        if (r > 0.0) {
            double e = r * r / (4.0 * u);
            if (e > 690.0) return 0.0;
            gauss *= std::exp(-e);
        }
        return u * gauss * subordinator_density(beta, s, u, inner_tol);
    };
    QuadResult q = integrate_gk(g, std::log(u_lo), std::log(u_hi), 0.25 * tol, 15);
    return q.value;
}

// Ratio of p(s,r) to the two-sided envelope min(s^{-d/alpha}, s r^{-d-alpha}).
inline double density_envelope_ratio(const StableParams& p, double s, double r,
                                     double tol = 1e-8) {
    double env = std::pow(s, -static_cast<double>(p.d) / p.alpha);
    if (r > 0.0) env = std::min(env, s * std::pow(r, -(p.d + p.alpha)));
    return stable_density(p, s, r, tol) / env;
}

// ---------------------------------------------------------------------------
// Self-similar radial profile: p(s, r) = s^{-d/beta} profile(r s^{-1/beta})
// for index beta in (0,2). Tabulated once on a log-radius grid (cubic
// interpolation in log-log), quadratic model below, first-order power tail
// p(1,r) ~ c(d,beta) r^{-d-beta} above.

class StableProfile {
  public:
    StableProfile(int d, double beta, double build_tol = 1e-10)
        : d_(d), beta_(beta) {
        StableParams sp{d, beta};
        sp.validate();
        p0_ = stable_density_at_origin(sp, 1.0);
        c2_ = std::pow(2.0 * M_PI, -d) * unit_sphere_area(d) *
              std::tgamma((d + 2.0) / beta) / (2.0 * d * beta);
        tail_c_ = levy_constant(d, beta);
        lr_lo_ = std::log(1e-3);
        lr_hi_ = std::log(1e4);
        n_ = 673; // 96 nodes per decade over 7 decades
        dl_ = (lr_hi_ - lr_lo_) / (n_ - 1);
        logp_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            double r = std::exp(lr_lo_ + i * dl_);
            QuadResult q = stable_density_info(sp, 1.0, r, build_tol);
            accuracy_ = std::max(accuracy_, q.abs_err);
            logp_[i] = std::log(std::max(q.value, 1e-300));
        }
    }

    int dim() const { return d_; }
    double index() const { return beta_; }
    double at_origin() const { return p0_; }
    double accuracy() const { return accuracy_; }
    double tail_constant() const { return tail_c_; }

    // p(1, r)
    double profile(double r) const {
        if (r < 0.0) throw std::domain_error("profile: radius must be >= 0");
        double lr = std::log(std::max(r, 1e-300));
        if (lr <= lr_lo_) return p0_ - c2_ * r * r;
        if (lr >= lr_hi_) return tail_c_ * std::pow(r, -(d_ + beta_));
        double fi = (lr - lr_lo_) / dl_;
        int i = static_cast<int>(fi);
        if (i < 1) i = 1;
        if (i > n_ - 3) i = n_ - 3;
        double t = fi - i;
        // 4-point Lagrange cubic on the uniform log grid
        double ym1 = logp_[i - 1], y0 = logp_[i], y1 = logp_[i + 1], y2 = logp_[i + 2];
        double a0 = y0;
        double a1 = 0.5 * (y1 - ym1);
        double a2 = ym1 - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
        double a3 = 0.5 * (y2 - ym1) + 1.5 * (y0 - y1);
        return std::exp(a0 + t * (a1 + t * (a2 + t * a3)));
    }

    // p(s, r) by self-similarity
    double density(double s, double r) const {
        if (!(s > 0.0)) throw std::domain_error("profile density: s must be > 0");
        double sc = std::pow(s, -1.0 / beta_);
        return std::pow(s, -d_ / beta_) * profile(r * sc);
    }

    // mass of p(1, .) outside radius R (first-order tail estimate; used for
    // wraparound bounds)
    double tail_mass(double R) const {
        if (R <= 0.0) return 1.0;
        double m = tail_c_ * unit_sphere_area(d_) * std::pow(R, -beta_) / beta_;
        return std::min(1.0, m);
    }

  private:
    int d_;
    double beta_;
    double p0_, c2_, tail_c_;
    double lr_lo_, lr_hi_, dl_;
    int n_;
    double accuracy_ = 0.0;
    std::vector<double> logp_;
};

// Process-wide profile cache keyed by (d, index).
inline const StableProfile& get_profile(int d, double beta) {
    static std::map<std::pair<int, long long>, std::unique_ptr<StableProfile>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lk(mtx);
    auto key = std::make_pair(d, static_cast<long long>(beta * 1e12));
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<StableProfile>(d, beta)).first;
    return *it->second;
}

// ---------------------------------------------------------------------------
// Bulk kernel table: values of p(s, r) on an (s_grid x r_grid) lattice.

struct KernelTable {
    StableParams params;
    std::vector<double> s_grid; // strictly increasing, positive
    std::vector<double> r_grid; // strictly increasing, starting at >= 0
    std::vector<double> values; // row-major, s index major
    double accuracy = 0.0;

    static KernelTable build(const StableParams& p, std::vector<double> s_grid,
                             std::vector<double> r_grid, double tol = 1e-8) {
        p.validate();
        KernelTable t;
        t.params = p;
        t.s_grid = std::move(s_grid);
        t.r_grid = std::move(r_grid);
        t.check_grids();
        const StableProfile& prof = get_profile(p.d, p.alpha);
        t.values.resize(t.s_grid.size() * t.r_grid.size());
        for (std::size_t i = 0; i < t.s_grid.size(); ++i)
            for (std::size_t j = 0; j < t.r_grid.size(); ++j)
                t.values[i * t.r_grid.size() + j] = prof.density(t.s_grid[i], t.r_grid[j]);
        t.accuracy = std::max(prof.accuracy(), tol);
        t.validate();
        return t;
    }

    void check_grids() const {
        auto mono = [](const std::vector<double>& g) {
            for (std::size_t i = 1; i < g.size(); ++i)
                if (!(g[i] > g[i - 1])) return false;
            return !g.empty();
        };
        if (!mono(s_grid) || !(s_grid.front() > 0.0))
            throw std::invalid_argument("KernelTable: s_grid must be positive increasing");
        if (!mono(r_grid) || r_grid.front() < 0.0)
            throw std::invalid_argument("KernelTable: r_grid must be nonnegative increasing");
    }

    double at(std::size_t i, std::size_t j) const { return values[i * r_grid.size() + j]; }

    // radial monotonicity and positivity; throws on violation
    void validate() const {
        check_grids();
        if (values.size() != s_grid.size() * r_grid.size())
            throw std::invalid_argument("KernelTable: value count mismatch");
        for (std::size_t i = 0; i < s_grid.size(); ++i)
            for (std::size_t j = 0; j < r_grid.size(); ++j) {
                double v = at(i, j);
                if (!(v > 0.0)) throw std::domain_error("KernelTable: nonpositive entry");
                if (j > 0 && v > at(i, j - 1) * (1.0 + 1e-12))
                    throw std::domain_error("KernelTable: radial monotonicity violated");
            }
    }

    // normalized radial mass area(S^{d-1}) int p r^{d-1} dr over the covered
    // range plus the analytic tail beyond; should be 1 within accuracy bounds
    double radial_mass(std::size_t i) const {
        double m = 0.0;
        int d = params.d;
        for (std::size_t j = 1; j < r_grid.size(); ++j) {
            double r0 = r_grid[j - 1], r1 = r_grid[j];
            double f0 = at(i, j - 1) * std::pow(r0, d - 1);
            double f1 = at(i, j) * std::pow(r1, d - 1);
            m += 0.5 * (f0 + f1) * (r1 - r0);
        }
        m *= unit_sphere_area(d);
        const StableProfile& prof = get_profile(d, params.alpha);
        double rn = r_grid.back() * std::pow(s_grid[i], -1.0 / params.alpha);
        return m + prof.tail_mass(rn);
    }

    // bilinear interpolation of log p in (log s, r)
    double interpolate(double s, double r) const {
        if (!(s >= s_grid.front() && s <= s_grid.back()))
            throw std::domain_error("KernelTable: s outside table");
        if (!(r >= r_grid.front() && r <= r_grid.back()))
            throw std::domain_error("KernelTable: r outside table");
        auto bracket = [](const std::vector<double>& g, double v) {
            std::size_t lo = 0, hi = g.size() - 1;
            while (hi - lo > 1) {
                std::size_t mid = (lo + hi) / 2;
                (g[mid] <= v ? lo : hi) = mid;
            }
            return lo;
        };
        std::size_t i = bracket(s_grid, s), j = bracket(r_grid, r);
        double ts = (std::log(s) - std::log(s_grid[i])) /
                    (std::log(s_grid[i + 1]) - std::log(s_grid[i]));
        double tr = (r - r_grid[j]) / (r_grid[j + 1] - r_grid[j]);
        double l00 = std::log(at(i, j)), l01 = std::log(at(i, j + 1));
        double l10 = std::log(at(i + 1, j)), l11 = std::log(at(i + 1, j + 1));
        double l = (1 - ts) * ((1 - tr) * l00 + tr * l01) + ts * ((1 - tr) * l10 + tr * l11);
        return std::exp(l);
    }
};

} // namespace sbm
