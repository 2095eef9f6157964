#pragma once
// Time-stepping simulation of the product process. Each step draws an
// exact-in-law pair (stable horizontal increment, Brownian vertical
// increment); boundary and box-face crossings of the continuous vertical
// component are detected with the Brownian-bridge minimum law, horizontal
// crossings state-to-state (jumps land strictly outside, no bridge exists).
//
// Timing conventions chosen to cancel the first-order discretization bias:
// a bridge-declared crossing is dated at the step midpoint, a state-detected
// vertical crossing at the linearly interpolated level-crossing time, and a
// horizontal (jump) exit at the step end.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "box.hpp"
#include "params.hpp"
#include "path.hpp"
#include "rng.hpp"
#include "samplers.hpp"

namespace sbm {

// Probability that a Brownian bridge (variance 2 per unit time) pinned at
// heights a > 0 and b > 0 over a step of length dt dips to 0 in between:
// exp(-2ab/(sigma^2 dt)) with sigma^2 = 2.
inline double bridge_crossing_prob(double a, double b, double dt) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("bridge_crossing_prob: endpoints must be > 0");
    if (!(dt > 0.0)) throw std::domain_error("bridge_crossing_prob: dt must be > 0");
    return std::exp(-a * b / dt);
}

struct SimOptions {
    double jump_threshold = HUGE_VAL; // record jumps with |dY| >= threshold
    bool record_states = false;       // keep every step state, not just ends
    bool bridge_correction = true;    // off = detect crossings state-to-state only
};

namespace detail {
inline double euclid(const double* v, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}
} // namespace detail

// Free run from start until absorption at the boundary or the horizon,
// whichever comes first.
inline PathRecord run_path(const StableParams& p, const SpaceTimePoint& start, double dt,
                           double horizon, RngStream& rng, const SimOptions& opt = {}) {
    p.validate();
    if (static_cast<int>(start.x.size()) != p.d)
        throw std::domain_error("run_path: start dimension mismatch");
    if (!(dt > 0.0) || !(horizon > 0.0))
        throw std::domain_error("run_path: dt and horizon must be > 0");
    if (dt > horizon * (1.0 + 1e-12))
        throw std::domain_error("run_path: dt must not exceed the horizon");

    PathRecord rec;
    rec.dt = dt;
    rec.jump_threshold = opt.jump_threshold;
    std::vector<double> x = start.x;
    double z = start.t, time = 0.0;
    auto push = [&]() { rec.states.push_back(PathState{time, x, z}); };
    push(); // start
    if (z <= 0.0) { // degenerate start: already absorbed
        rec.T0 = 0.0;
        return rec;
    }
    std::vector<double> dy(p.d);
    while (time < horizon * (1.0 - 1e-12)) {
        double step = std::min(dt, horizon - time);
        sample_stable_increment(p, step, rng, dy.data());
        double dz = sample_brownian_increment(step, rng);
        double z2 = z + dz;
        double mag = detail::euclid(dy.data(), p.d);
        if (mag >= opt.jump_threshold) {
            JumpEvent j;
            j.time = time + step;
            j.pre_position = x;
            j.magnitude = mag;
            for (int i = 0; i < p.d; ++i) x[i] += dy[i];
            j.post_position = x;
            rec.jumps.push_back(std::move(j));
        } else {
            for (int i = 0; i < p.d; ++i) x[i] += dy[i];
        }
        if (z2 <= 0.0) { // crossed within the step, interpolate the time
            double frac = z / (z - z2);
            time += frac * step;
            z = 0.0;
            rec.T0 = time;
            push();
            return rec;
        }
        if (opt.bridge_correction &&
            rng.next_double() < bridge_crossing_prob(z, z2, step)) {
            time += 0.5 * step;
            z = 0.0;
            rec.T0 = time;
            push();
            return rec;
        }
        z = z2;
        time += step;
        if (opt.record_states) push();
    }
    if (!opt.record_states) push(); // final state
    return rec;
}

struct ExitSample {
    double tau = 0.0;
    SpaceTimePoint point; // post-exit state (on the face for vertical exits)
    int face = -1;        // encoding as in ExitEvent
    std::size_t steps = 0;
};

// First exit from an anisotropic box. Horizontal faces are overshot by jumps
// (post-step check); vertical faces use interpolation/bridge against both
// levels. The cap bounds the walk defensively; it is far beyond any
// realistic exit time and a capped sample reports face -1.
inline ExitSample exit_time_from_box(const StableParams& p, const AnisotropicBox& box,
                                     const SpaceTimePoint& start, double dt,
                                     RngStream& rng, const SimOptions& opt = {},
                                     double horizon_cap = 0.0) {
    p.validate();
    box.validate(p.d);
    if (!box.in_half_space())
        throw GeometryError("exit box leaves the half-space (center.t - r/2 = " +
                            std::to_string(box.center.t - 0.5 * box.r) + " < 0)");
    if (!box.contains(start, p.alpha))
        throw GeometryError("exit start lies outside the box");
    if (!(dt > 0.0)) throw std::domain_error("exit_time_from_box: dt must be > 0");
    if (horizon_cap <= 0.0) horizon_cap = 4000.0 * box.r * box.r;

    const double hw = box.horizontal_half_width(p.alpha);
    const double vlo = box.bottom(), vhi = box.top();
    std::vector<double> x = start.x, dy(p.d);
    double z = start.t, time = 0.0;
    ExitSample out;
    while (time < horizon_cap) {
        sample_stable_increment(p, dt, rng, dy.data());
        double dz = sample_brownian_increment(dt, rng);
        double z2 = z + dz;
        for (int i = 0; i < p.d; ++i) x[i] += dy[i];
        ++out.steps;
        int hface = -1;
        for (int i = 0; i < p.d; ++i)
            if (std::fabs(x[i] - box.center.x[i]) > hw) { hface = i; break; }
        if (hface >= 0) { // jump exit, dated at the step end
            out.tau = time + dt;
            out.point = SpaceTimePoint{x, z2};
            out.face = hface;
            return out;
        }
        if (z2 >= vhi) {
            double frac = (vhi - z) / (z2 - z);
            out.tau = time + frac * dt;
            out.point = SpaceTimePoint{x, vhi};
            out.face = p.d + 1;
            return out;
        }
        if (z2 <= vlo) {
            double frac = (z - vlo) / (z - z2);
            out.tau = time + frac * dt;
            out.point = SpaceTimePoint{x, vlo};
            out.face = p.d;
            return out;
        }
        if (opt.bridge_correction) {
            double plo = bridge_crossing_prob(z - vlo, z2 - vlo, dt);
            double phi = bridge_crossing_prob(vhi - z, vhi - z2, dt);
            double u = rng.next_double();
            if (u < plo + phi) { // union bound; joint touch is negligible
                out.tau = time + 0.5 * dt;
                out.point = SpaceTimePoint{x, u < plo ? vlo : vhi};
                out.face = u < plo ? p.d : p.d + 1;
                return out;
            }
        }
        z = z2;
        time += dt;
    }
    out.tau = time;
    out.point = SpaceTimePoint{x, z};
    out.face = -1;
    return out;
}

// True iff the path enters the closed target before leaving the container.
// Detection is state-to-state for the target (grazing visits between steps
// are missed, which only weakens lower-bound estimates); container faces get
// the same treatment as in exit_time_from_box, and a bridge-declared face
// touch counts as an exit even if the step lands back inside.
inline bool hitting_before_exit(const StableParams& p, const TargetSet& target,
                                const AnisotropicBox& container,
                                const SpaceTimePoint& start, double dt, RngStream& rng,
                                const SimOptions& opt = {}) {
    p.validate();
    container.validate(p.d);
    if (!container.in_half_space())
        throw GeometryError("container box leaves the half-space");
    if (!container.contains(start, p.alpha))
        throw GeometryError("hitting start lies outside the container");
    if (!target.inside(container, p.alpha))
        throw GeometryError("target set is not inside the container");
    if (target.contains(start, p.alpha)) return true; // hit at time 0

    const double hw = container.horizontal_half_width(p.alpha);
    const double vlo = container.bottom(), vhi = container.top();
    const double cap = 4000.0 * container.r * container.r;
    std::vector<double> x = start.x, dy(p.d);
    double z = start.t, time = 0.0;
    while (time < cap) {
        sample_stable_increment(p, dt, rng, dy.data());
        double dz = sample_brownian_increment(dt, rng);
        double z2 = z + dz;
        for (int i = 0; i < p.d; ++i) x[i] += dy[i];
        bool outside = z2 >= vhi || z2 <= vlo;
        for (int i = 0; i < p.d && !outside; ++i)
            outside = std::fabs(x[i] - container.center.x[i]) > hw;
        if (outside) return false;
        if (opt.bridge_correction) {
            double ptouch = bridge_crossing_prob(z - vlo, z2 - vlo, dt) +
                            bridge_crossing_prob(vhi - z, vhi - z2, dt);
            if (rng.next_double() < ptouch) return false;
        }
        if (target.contains(x.data(), z2, p.alpha)) return true;
        z = z2;
        time += dt;
    }
    return false;
}

inline std::size_t jump_census(const PathRecord& path, double R) {
    if (R < path.jump_threshold)
        throw std::domain_error("jump_census: R below the recording threshold");
    std::size_t n = 0;
    for (const auto& j : path.jumps)
        if (j.magnitude > R) ++n;
    return n;
}

// Discounted path integral int_0^horizon e^{-lambda s} f(X_s) ds along one
// sampled path; the resolvent's Monte Carlo route. The discount factor is
// taken at the step midpoint against the step-end state. The unstopped
// variant continues through the boundary with f extended by zero below it.
inline double discounted_path_integral(
    const StableParams& p, const SpaceTimePoint& start, double lambda,
    const std::function<double(const double*, double)>& f, double dt, double horizon,
    RngStream& rng, bool killed = false) {
    p.validate();
    if (!(lambda > 0.0))
        throw std::domain_error("discounted_path_integral: lambda must be > 0");
    std::vector<double> x = start.x, dy(p.d);
    double z = start.t, time = 0.0, acc = 0.0;
    while (time < horizon * (1.0 - 1e-12)) {
        double step = std::min(dt, horizon - time);
        sample_stable_increment(p, step, rng, dy.data());
        double dz = sample_brownian_increment(step, rng);
        double z2 = z + dz;
        for (int i = 0; i < p.d; ++i) x[i] += dy[i];
        if (killed && z > 0.0) {
            if (z2 <= 0.0) return acc;
            if (rng.next_double() < bridge_crossing_prob(z, z2, step)) return acc;
        }
        double w = std::exp(-lambda * (time + 0.5 * step)) * step;
        if (z2 > 0.0) acc += w * f(x.data(), z2);
        z = z2;
        time += step;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Two-resolution machinery for the discretization-consistency checks: one
// pre-drawn tape of fine increments at dt/2 drives both the fine walk (one
// entry per step) and the coarse walk (pair sums per step), so the two
// estimates differ only through near-face decisions and their gap stays well
// inside one standard error.

class IncrementTape {
  public:
    IncrementTape(const StableParams& p, double dt_fine, std::size_t n_fine,
                  RngStream& rng)
        : d_(p.d), dt_fine_(dt_fine), data_((p.d + 1) * n_fine) {
        std::vector<double> dy(p.d);
        for (std::size_t k = 0; k < n_fine; ++k) {
            sample_stable_increment(p, dt_fine, rng, dy.data());
            double dz = sample_brownian_increment(dt_fine, rng);
            double* e = entry(k);
            for (int i = 0; i < p.d; ++i) e[i] = dy[i];
            e[p.d] = dz;
        }
    }
    int d() const { return d_; }
    double dt_fine() const { return dt_fine_; }
    std::size_t size() const { return data_.size() / (d_ + 1); }
    const double* entry(std::size_t k) const { return data_.data() + k * (d_ + 1); }
    double* entry(std::size_t k) { return data_.data() + k * (d_ + 1); }

  private:
    int d_;
    double dt_fine_;
    std::vector<double> data_;
};

// Box-exit walk consuming `factor` consecutive tape entries per step. A box
// with its bottom face at 0 and a huge horizontal stretch turns this into a
// coupled absorption-time sampler. face -1 = tape exhausted before exit.
inline ExitSample exit_from_tape(const StableParams& p, const AnisotropicBox& box,
                                 const SpaceTimePoint& start, const IncrementTape& tape,
                                 int factor, RngStream& aux) {
    p.validate();
    box.validate(p.d);
    const double dt = tape.dt_fine() * factor;
    const double hw = box.horizontal_half_width(p.alpha);
    const double vlo = box.bottom(), vhi = box.top();
    std::vector<double> x = start.x;
    double z = start.t, time = 0.0;
    ExitSample out;
    std::size_t n_steps = tape.size() / factor;
    for (std::size_t k = 0; k < n_steps; ++k) {
        double dz = 0.0;
        for (int s = 0; s < factor; ++s) {
            const double* e = tape.entry(k * factor + s);
            for (int i = 0; i < p.d; ++i) x[i] += e[i];
            dz += e[p.d];
        }
        double z2 = z + dz;
        ++out.steps;
        int hface = -1;
        for (int i = 0; i < p.d; ++i)
            if (std::fabs(x[i] - box.center.x[i]) > hw) { hface = i; break; }
        if (hface >= 0) {
            out.tau = time + dt;
            out.point = SpaceTimePoint{x, z2};
            out.face = hface;
            return out;
        }
        if (z2 >= vhi || z2 <= vlo) {
            bool top = z2 >= vhi;
            double frac = top ? (vhi - z) / (z2 - z) : (z - vlo) / (z - z2);
            out.tau = time + frac * dt;
            out.point = SpaceTimePoint{x, top ? vhi : vlo};
            out.face = top ? p.d + 1 : p.d;
            return out;
        }
        double plo = bridge_crossing_prob(z - vlo, z2 - vlo, dt);
        double phi = bridge_crossing_prob(vhi - z, vhi - z2, dt);
        double u = aux.next_double();
        if (u < plo + phi) {
            out.tau = time + 0.5 * dt;
            out.point = SpaceTimePoint{x, u < plo ? vlo : vhi};
            out.face = u < plo ? p.d : p.d + 1;
            return out;
        }
        z = z2;
        time += dt;
    }
    out.tau = time;
    out.point = SpaceTimePoint{x, z};
    out.face = -1;
    return out;
}

} // namespace sbm
