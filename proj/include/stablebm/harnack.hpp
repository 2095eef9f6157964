#pragma once
// Experiment drivers turning path samples and deterministic extensions into
// confidence-interval estimates: exit times and their r-scaling, box hitting
// probabilities with the fitted lower-bound constant, the measure-to-hitting
// envelope phi, exit-distribution comparability, sup/inf ratios of positive
// extensions over a reference box, oscillation decay across nested boxes,
// and pointwise modulus-of-continuity fits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "box.hpp"
#include "extension_eval.hpp"
#include "grid.hpp"
#include "grid_ops.hpp"
#include "parallel.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "simulate.hpp"
#include "stats.hpp"

namespace sbm {

struct HolderFit {
    double gamma_hat = 0.0;
    double c_hat = 0.0;
    double residual = 0.0;
};

struct OscLevel {
    int k = 0;
    double a = 0.0; // infimum over the level box
    double b = 0.0; // supremum over the level box
};

struct OscillationProfile {
    double theta = 0.0;
    std::vector<OscLevel> levels;
    bool contraction_ok = true; // false = oscillation failed to decrease somewhere
};

struct MonteCarloOptions {
    double dt = 1e-3;
    std::uint64_t seed = 1;
    std::uint64_t stream_base = 0;
    int workers = 1;
    double confidence = 0.99;
    SimOptions sim;
};

namespace detail {

inline EstimateCI proportion_estimate(std::size_t k, std::size_t n, double confidence) {
    ProportionCI w = wilson_ci(k, n, confidence);
    EstimateCI ci;
    ci.mean = w.p_hat;
    ci.std_error = w.std_error;
    ci.n = n;
    ci.confidence = confidence;
    return ci;
}

inline bool box_inside(const AnisotropicBox& inner, const AnisotropicBox& outer,
                       int d, double alpha) {
    double hw_i = inner.horizontal_half_width(alpha);
    double hw_o = outer.horizontal_half_width(alpha);
    for (int a = 0; a < d; ++a)
        if (std::fabs(inner.center.x[a] - outer.center.x[a]) + hw_i > hw_o + 1e-12)
            return false;
    return inner.bottom() >= outer.bottom() - 1e-12 &&
           inner.top() <= outer.top() + 1e-12;
}

inline bool box_disjoint(const AnisotropicBox& a, const AnisotropicBox& b, int d,
                         double alpha) {
    if (a.top() <= b.bottom() || b.top() <= a.bottom()) return true;
    double hw = a.horizontal_half_width(alpha) + b.horizontal_half_width(alpha);
    for (int i = 0; i < d; ++i)
        if (std::fabs(a.center.x[i] - b.center.x[i]) >= hw) return true;
    return false;
}

} // namespace detail

// Mean exit time from the box over n independent paths.
inline EstimateCI estimate_mean_exit_time(const StableParams& p,
                                          const AnisotropicBox& box,
                                          const SpaceTimePoint& start, std::size_t n,
                                          double dt, const MonteCarloOptions& opt = {}) {
    p.validate();
    box.validate(p.d);
    if (!box.in_half_space())
        throw GeometryError("exit box leaves the half-space (center.t - r/2 = " +
                            std::to_string(box.center.t - 0.5 * box.r) + " < 0)");
    if (!box.contains_interior(start.x.data(), start.t, p.alpha))
        throw GeometryError("exit start must lie in the box interior");
    std::vector<double> taus(n, 0.0);
    parallel_for_indexed(n, opt.workers, [&](std::size_t i) {
        RngStream rng(opt.seed, opt.stream_base + i);
        taus[i] = exit_time_from_box(p, box, start, dt, rng, opt.sim).tau;
    });
    MeanAccumulator acc;
    for (double t : taus) acc.add(t);
    return acc.estimate(opt.confidence);
}

// Fitted r-exponent of the mean exit time over a set of radii. Each radius
// runs its own standard box (centered at height r so the geometry is an
// exact dilation) with the step scaled as r^2, making the walks at all radii
// identical in law up to scaling.
inline LineFit exit_time_r_exponent(const StableParams& p,
                                    const std::vector<double>& radii, std::size_t n,
                                    double dt_unit, const MonteCarloOptions& opt = {}) {
    if (radii.size() < 2)
        throw std::invalid_argument("exit_time_r_exponent: need at least two radii");
    std::vector<double> log_r, log_tau;
    MonteCarloOptions o = opt;
    for (double r : radii) {
        AnisotropicBox box;
        box.center = make_point(std::vector<double>(p.d, 0.0), r);
        box.r = r;
        EstimateCI ci =
            estimate_mean_exit_time(p, box, box.center, n, dt_unit * r * r, o);
        o.stream_base += n; // independent ensemble per radius
        log_r.push_back(std::log(r));
        log_tau.push_back(std::log(ci.mean));
    }
    return fit_line(log_r, log_tau);
}

// P(hit K before leaving the container), with the container treated as the
// 3-fold box of the underlying unit geometry: K must fit in its inner third,
// the start in its inner two-thirds, and the 2-fold enlargement must stay in
// the half-space.
inline EstimateCI estimate_box_hitting_probability(const StableParams& p,
                                                   const AnisotropicBox& K,
                                                   const SpaceTimePoint& start,
                                                   const AnisotropicBox& container,
                                                   std::size_t n, double dt,
                                                   const MonteCarloOptions& opt = {}) {
    p.validate();
    K.validate(p.d);
    container.validate(p.d);
    AnisotropicBox d1 = container.scaled(1.0 / 3.0);
    AnisotropicBox d2 = container.scaled(2.0 / 3.0);
    AnisotropicBox d6 = container.scaled(2.0);
    if (!d6.in_half_space())
        throw GeometryError("D_6 box leaves the half-space (center.t = " +
                            std::to_string(container.center.t) + " < " +
                            std::to_string(0.5 * d6.r) + ")");
    if (!detail::box_inside(K, d1, p.d, p.alpha))
        throw GeometryError("target K is not inside D_1");
    if (!d2.contains(start.x.data(), start.t, p.alpha))
        throw GeometryError("start lies outside D_2");
    TargetSet target;
    target.include.push_back(K);
    std::vector<unsigned char> hit(n, 0);
    parallel_for_indexed(n, opt.workers, [&](std::size_t i) {
        RngStream rng(opt.seed, opt.stream_base + i);
        hit[i] = hitting_before_exit(p, target, container, start, dt, rng, opt.sim) ? 1 : 0;
    });
    std::size_t k = 0;
    for (unsigned char h : hit) k += h;
    return detail::proportion_estimate(k, n, opt.confidence);
}

struct HittingSweepRow {
    double measure = 0.0; // m(E) * (b - a) of the target box
    EstimateCI estimate;
};

struct HittingSweep {
    double c_hat = 0.0; // min over rows of probability / measure
    std::vector<HittingSweepRow> rows;
};

inline HittingSweep hitting_constant_sweep(const StableParams& p,
                                           const std::vector<AnisotropicBox>& targets,
                                           const SpaceTimePoint& start,
                                           const AnisotropicBox& container,
                                           std::size_t n, double dt,
                                           const MonteCarloOptions& opt = {}) {
    HittingSweep sweep;
    sweep.c_hat = HUGE_VAL;
    MonteCarloOptions o = opt;
    for (const AnisotropicBox& K : targets) {
        HittingSweepRow row;
        row.measure = K.measure(p.d, p.alpha);
        row.estimate = estimate_box_hitting_probability(p, K, start, container, n, dt, o);
        o.stream_base += n;
        sweep.c_hat = std::min(sweep.c_hat, row.estimate.mean / row.measure);
        sweep.rows.push_back(row);
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// The measure-to-hitting envelope: compact shapes inside the unit box at a
// prescribed measure fraction, in three families — a concentric sub-box, two
// disjoint sub-boxes, and a box-minus-box ring.

inline std::vector<TargetSet> phi_shape_family(const StableParams& p,
                                               const AnisotropicBox& d1,
                                               double epsilon) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw std::invalid_argument("phi_shape_family: epsilon must be in (0,1]");
    const double q = 2.0 * p.d / p.alpha + 1.0; // box measure scales as r^q
    std::vector<TargetSet> shapes;

    TargetSet sub;
    sub.include.push_back(d1.scaled(std::pow(epsilon, 1.0 / q)));
    shapes.push_back(sub);

    double rho = std::pow(0.5 * epsilon, 1.0 / q);
    AnisotropicBox piece = d1.scaled(rho);
    double shift = d1.horizontal_half_width(p.alpha) -
                   piece.horizontal_half_width(p.alpha);
    if (shift > piece.horizontal_half_width(p.alpha)) { // disjoint and inside
        TargetSet pair;
        AnisotropicBox left = piece, right = piece;
        left.center.x[0] -= shift;
        right.center.x[0] += shift;
        pair.include.push_back(left);
        pair.include.push_back(right);
        shapes.push_back(pair);
    }

    double denom = 1.0 - std::pow(0.5, q);
    double rho_out = std::pow(epsilon / denom, 1.0 / q);
    if (rho_out <= 1.0) {
        TargetSet ring;
        ring.include.push_back(d1.scaled(rho_out));
        ring.exclude.push_back(d1.scaled(0.5 * rho_out));
        shapes.push_back(ring);
    }
    return shapes;
}

struct PhiPoint {
    double epsilon = 0.0;
    EstimateCI envelope; // smallest hitting probability across shapes and starts
};

// For each measure fraction, the lower envelope over the shape family and a
// fixed fan of starts spread through D_2 of P(hit A before leaving D_3).
inline std::vector<PhiPoint> estimate_phi(const StableParams& p,
                                          const AnisotropicBox& container,
                                          const std::vector<double>& epsilon_grid,
                                          std::size_t n, double dt,
                                          const MonteCarloOptions& opt = {}) {
    p.validate();
    container.validate(p.d);
    AnisotropicBox d1 = container.scaled(1.0 / 3.0);
    AnisotropicBox d2 = container.scaled(2.0 / 3.0);
    if (!container.scaled(2.0).in_half_space())
        throw GeometryError("D_6 box leaves the half-space (center.t = " +
                            std::to_string(container.center.t) + " < " +
                            std::to_string(container.r) + ")");
    std::vector<SpaceTimePoint> starts;
    starts.push_back(d2.center);
    SpaceTimePoint s = d2.center;
    s.t = d2.center.t + 0.45 * d2.vertical_half_width();
    starts.push_back(s);
    s.t = d2.center.t - 0.45 * d2.vertical_half_width();
    starts.push_back(s);
    s = d2.center;
    s.x[0] += 0.45 * d2.horizontal_half_width(p.alpha);
    starts.push_back(s);

    std::vector<PhiPoint> out;
    MonteCarloOptions o = opt;
    for (double eps : epsilon_grid) {
        PhiPoint pt;
        pt.epsilon = eps;
        bool first = true;
        for (const TargetSet& shape : phi_shape_family(p, d1, eps)) {
            for (const SpaceTimePoint& st : starts) {
                std::vector<unsigned char> hit(n, 0);
                parallel_for_indexed(n, o.workers, [&](std::size_t i) {
                    RngStream rng(o.seed, o.stream_base + i);
                    hit[i] = hitting_before_exit(p, shape, container, st, dt, rng,
                                                 o.sim)
                                 ? 1
                                 : 0;
                });
                o.stream_base += n;
                std::size_t k = 0;
                for (unsigned char h : hit) k += h;
                EstimateCI ci = detail::proportion_estimate(k, n, o.confidence);
                if (first || ci.mean < pt.envelope.mean) pt.envelope = ci;
                first = false;
            }
        }
        out.push_back(pt);
    }
    return out;
}

// Fraction of exits from `box` landing in the far set F (all of F outside
// the doubled box, so only jump exits can reach it).
inline EstimateCI exit_location_probability(const StableParams& p,
                                            const AnisotropicBox& box,
                                            const SpaceTimePoint& start,
                                            const TargetSet& far_set, std::size_t n,
                                            double dt,
                                            const MonteCarloOptions& opt = {}) {
    p.validate();
    box.validate(p.d);
    AnisotropicBox d2 = box.scaled(2.0);
    for (const AnisotropicBox& b : far_set.include)
        if (!detail::box_disjoint(b, d2, p.d, p.alpha))
            throw GeometryError("far target set intersects the doubled box");
    std::vector<unsigned char> in_f(n, 0);
    parallel_for_indexed(n, opt.workers, [&](std::size_t i) {
        RngStream rng(opt.seed, opt.stream_base + i);
        ExitSample s = exit_time_from_box(p, box, start, dt, rng, opt.sim);
        in_f[i] = far_set.contains(s.point.x.data(), s.point.t, p.alpha) ? 1 : 0;
    });
    std::size_t k = 0;
    for (unsigned char h : in_f) k += h;
    return detail::proportion_estimate(k, n, opt.confidence);
}

// ---------------------------------------------------------------------------
// Deterministic-extension experiments.

struct HarnackDatumResult {
    double ratio = 0.0; // sup / inf of the extension over the sample cloud
    double min_value = 0.0;
    double max_value = 0.0;
};

struct HarnackReport {
    double max_ratio = 0.0;
    std::vector<HarnackDatumResult> per_datum;
};

// Sup/inf ratio of the extensions of nonnegative data over a sample cloud in
// the unit reference box. The box must sit high enough that its 32-fold
// enlargement stays in the half-space.
inline HarnackReport harnack_ratio_experiment(const StableParams& p,
                                              const std::vector<GridFunction>& data,
                                              const AnisotropicBox& box,
                                              const std::vector<double>& t_grid,
                                              int n_points,
                                              const ExtendOptions& ext = {}) {
    p.validate();
    box.validate(p.d);
    if (!box.scaled(32.0).in_half_space())
        throw GeometryError("D~_32 box leaves the half-space (center.t = " +
                            std::to_string(box.center.t) + " < " +
                            std::to_string(16.0 * box.r) + ")");
    if (n_points < 2)
        throw std::invalid_argument("harnack_ratio_experiment: n_points must be >= 2");
    for (double t : t_grid)
        if (t < box.bottom() - 1e-12 || t > box.top() + 1e-12)
            throw GeometryError("evaluation height outside the reference box");

    HarnackReport report;
    const double hw = box.horizontal_half_width(p.alpha);
    for (const GridFunction& f : data) {
        for (double v : f.values)
            if (v < 0.0)
                throw std::invalid_argument("harnack datum must be nonnegative");
        std::vector<GridFunction> slices = extend_many(f, p, t_grid, ext);
        HarnackDatumResult res;
        res.min_value = HUGE_VAL;
        res.max_value = -HUGE_VAL;
        std::vector<double> xy(static_cast<std::size_t>(p.d), 0.0);
        for (const GridFunction& u : slices) {
            std::vector<int> steps(static_cast<std::size_t>(p.d), 0);
            std::vector<int> idx(static_cast<std::size_t>(p.d), 0);
            for (;;) {
                for (int a = 0; a < p.d; ++a)
                    xy[static_cast<std::size_t>(a)] =
                        box.center.x[static_cast<std::size_t>(a)] - hw +
                        2.0 * hw * idx[static_cast<std::size_t>(a)] / (n_points - 1);
                double v = u.interpolate(xy.data());
                res.min_value = std::min(res.min_value, v);
                res.max_value = std::max(res.max_value, v);
                int a = p.d - 1;
                for (; a >= 0; --a) {
                    if (++idx[static_cast<std::size_t>(a)] < n_points) break;
                    idx[static_cast<std::size_t>(a)] = 0;
                }
                if (a < 0) break;
            }
        }
        if (!(res.min_value > 0.0))
            throw ToleranceError(
                "extension infimum is not positive over the reference box",
                res.min_value);
        res.ratio = res.max_value / res.min_value;
        report.max_ratio = std::max(report.max_ratio, res.ratio);
        report.per_datum.push_back(res);
    }
    return report;
}

// Oscillation of the extension over nested boxes around `center`, shrinking
// by `theta` per level; the infima/suprema are taken over a cumulative point
// cloud so the monotonicity built into nesting is preserved exactly.
inline std::pair<OscillationProfile, HolderFit> oscillation_profile(
    const StableParams& p, const GridFunction& datum, const SpaceTimePoint& center,
    double theta, int k_max, int n_points = 7) {
    p.validate();
    if (!(theta > 0.0) || theta > 1.0 / 3.0)
        throw std::invalid_argument("oscillation_profile: theta must be in (0, 1/3]");
    if (k_max < 1) throw std::invalid_argument("oscillation_profile: k_max must be >= 1");
    AnisotropicBox base;
    base.center = center;
    base.r = 1.0;
    if (!base.scaled(4.0).in_half_space())
        throw GeometryError("D_4 box leaves the half-space (center.t = " +
                            std::to_string(center.t) + " < 2)");

    ExtensionEvaluator u(datum, p);
    OscillationProfile prof;
    prof.theta = theta;
    double run_min = HUGE_VAL, run_max = -HUGE_VAL;
    std::vector<OscLevel> reversed;
    for (int k = k_max; k >= 0; --k) { // finest first: coarser levels absorb it
        AnisotropicBox box = base.scaled(std::pow(theta, k));
        double hw = box.horizontal_half_width(p.alpha);
        double vh = box.vertical_half_width();
        std::vector<double> xy(static_cast<std::size_t>(p.d), 0.0);
        for (int it = 0; it < n_points; ++it) {
            double t = box.center.t - vh + 2.0 * vh * it / (n_points - 1);
            std::vector<int> idx(static_cast<std::size_t>(p.d), 0);
            for (;;) {
                for (int a = 0; a < p.d; ++a)
                    xy[static_cast<std::size_t>(a)] =
                        box.center.x[static_cast<std::size_t>(a)] - hw +
                        2.0 * hw * idx[static_cast<std::size_t>(a)] / (n_points - 1);
                double v = u(xy.data(), t);
                run_min = std::min(run_min, v);
                run_max = std::max(run_max, v);
                int a = p.d - 1;
                for (; a >= 0; --a) {
                    if (++idx[static_cast<std::size_t>(a)] < n_points) break;
                    idx[static_cast<std::size_t>(a)] = 0;
                }
                if (a < 0) break;
            }
        }
        reversed.push_back(OscLevel{k, run_min, run_max});
    }
    for (auto it = reversed.rbegin(); it != reversed.rend(); ++it)
        prof.levels.push_back(*it);

    HolderFit fit;
    std::vector<double> ks, logs;
    double scale = std::fabs(prof.levels.front().b) + std::fabs(prof.levels.front().a);
    for (const OscLevel& lv : prof.levels) {
        double osc = lv.b - lv.a;
        if (osc > 1e-14 * std::max(1.0, scale)) {
            ks.push_back(lv.k);
            logs.push_back(std::log(osc));
        }
    }
    for (std::size_t i = 1; i < prof.levels.size(); ++i)
        if (prof.levels[i].b - prof.levels[i].a >
            (prof.levels[i - 1].b - prof.levels[i - 1].a) + 1e-14)
            prof.contraction_ok = false;
    if (ks.size() >= 2) {
        LineFit lf = fit_line(ks, logs);
        double beta_hat = std::exp(lf.slope);
        fit.gamma_hat = 0.5 * p.alpha * std::log(beta_hat) / std::log(theta);
        fit.c_hat = std::exp(lf.intercept);
        fit.residual = lf.rms_residual;
    }
    return {prof, fit};
}

// Fit of |g(p) - g(p')| <= c * (dist ^ gamma) over sampled point pairs of a
// stacked grid restricted to `region`; gamma from log-log regression when
// the data supports it, else the caller's probe exponent. The datum sup-norm
// is deliberately not divided out — c_hat absorbs it.
inline HolderFit holder_constant_estimate(const GridFunction& g,
                                          const AnisotropicBox& region, double alpha,
                                          double gamma_probe,
                                          std::size_t max_points = 64) {
    g.validate();
    if (g.t_slices.size() < 2)
        throw std::domain_error("holder_constant_estimate: stacked grid required");
    region.validate(g.d);
    struct Pt {
        std::vector<double> x;
        double t, v;
    };
    std::vector<Pt> pts;
    double hw = region.horizontal_half_width(alpha);
    std::vector<int> keep_rows;
    for (std::size_t k = 0; k < g.t_slices.size(); ++k)
        if (g.t_slices[k] >= region.bottom() && g.t_slices[k] <= region.top())
            keep_rows.push_back(static_cast<int>(k));
    std::vector<std::size_t> keep_cols;
    std::vector<int> idx(static_cast<std::size_t>(g.d), 0);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        bool in = true;
        for (int a = 0; a < g.d && in; ++a)
            in = std::fabs(g.coordinate(a, idx[static_cast<std::size_t>(a)]) -
                           region.center.x[static_cast<std::size_t>(a)]) <= hw;
        if (in) keep_cols.push_back(flat);
        for (int a = g.d - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < g.extent[a]) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    std::size_t total = keep_rows.size() * keep_cols.size();
    if (total == 0) throw GeometryError("region selects no grid points");
    std::size_t stride = std::max<std::size_t>(1, total / max_points);
    for (std::size_t q = 0; q < total; q += stride) {
        std::size_t kr = q / keep_cols.size(), kc = q % keep_cols.size();
        Pt pt;
        pt.t = g.t_slices[static_cast<std::size_t>(keep_rows[kr])];
        std::size_t rem = keep_cols[kc];
        pt.x.assign(static_cast<std::size_t>(g.d), 0.0);
        for (int a = g.d - 1; a >= 0; --a) {
            std::size_t e = static_cast<std::size_t>(g.extent[static_cast<std::size_t>(a)]);
            pt.x[static_cast<std::size_t>(a)] = g.coordinate(a, static_cast<int>(rem % e));
            rem /= e;
        }
        pt.v = g.slice_values[static_cast<std::size_t>(keep_rows[kr])][keep_cols[kc]];
        pts.push_back(std::move(pt));
    }

    std::vector<double> log_d, log_dv;
    double vmax = 0.0;
    for (const Pt& pt : pts) vmax = std::max(vmax, std::fabs(pt.v));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double d2 = (pts[i].t - pts[j].t) * (pts[i].t - pts[j].t);
            for (int a = 0; a < g.d; ++a)
                d2 += (pts[i].x[a] - pts[j].x[a]) * (pts[i].x[a] - pts[j].x[a]);
            double dist = std::min(std::sqrt(d2), 1.0);
            double dv = std::fabs(pts[i].v - pts[j].v);
            if (dist > 0.0 && dv > 1e-14 * std::max(1.0, vmax)) {
                log_d.push_back(std::log(dist));
                log_dv.push_back(std::log(dv));
            }
        }
    HolderFit fit;
    double gamma = gamma_probe;
    if (log_d.size() >= 8) {
        LineFit lf = fit_line(log_d, log_dv);
        if (lf.slope > 0.0) {
            gamma = std::min(lf.slope, 1.0);
            fit.residual = lf.rms_residual;
        }
    }
    fit.gamma_hat = gamma;
    for (std::size_t q = 0; q < log_d.size(); ++q)
        fit.c_hat = std::max(fit.c_hat, std::exp(log_dv[q] - gamma * log_d[q]));
    return fit;
}

} // namespace sbm
