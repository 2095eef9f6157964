#pragma once
// Pointwise harmonic extension of a gridded boundary datum by the direct
// kernel sum h^d sum_j f_j q_t(|x - y_j|), with q_t the boundary-to-height
// kernel (index alpha/2 at elapsed time t). Complements the spectral route:
// exact lattice sum at scattered off-grid target points, no wraparound.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "params.hpp"
#include "stable_density.hpp"

namespace sbm {

class ExtensionEvaluator {
  public:
    ExtensionEvaluator(GridFunction datum, const StableParams& p)
        : f_(std::move(datum)), p_(p), prof_(&get_profile(p.d, 0.5 * p.alpha)) {
        p_.validate();
        f_.validate();
        if (f_.d != p_.d)
            throw std::domain_error("ExtensionEvaluator: dimension mismatch");
        if (!f_.t_slices.empty())
            throw std::domain_error("ExtensionEvaluator: datum must be a single layer");
        hd_ = std::pow(f_.spacing, f_.d);
    }

    // u(x, t); t = 0 returns the interpolated datum itself
    double operator()(const double* x, double t) const {
        if (t < 0.0) throw std::domain_error("ExtensionEvaluator: t must be >= 0");
        if (t == 0.0) return f_.interpolate(x);
        const double beta = 0.5 * p_.alpha;
        const double rs = std::pow(t, -1.0 / beta);
        const double vs = std::pow(t, -static_cast<double>(p_.d) / beta);
        double sum = 0.0;
        if (p_.d == 1) {
            for (std::size_t j = 0; j < f_.size(); ++j) {
                double v = f_.values[j];
                if (v == 0.0) continue;
                double r = std::fabs(x[0] - f_.coordinate(0, static_cast<int>(j)));
                sum += v * prof_->profile(r * rs);
            }
        } else {
            std::vector<int> idx(p_.d, 0);
            for (std::size_t j = 0; j < f_.size(); ++j) {
                double v = f_.values[j];
                if (v != 0.0) {
                    double r2 = 0.0;
                    for (int a = 0; a < p_.d; ++a) {
                        double dxa = x[a] - f_.coordinate(a, idx[a]);
                        r2 += dxa * dxa;
                    }
                    sum += v * prof_->profile(std::sqrt(r2) * rs);
                }
                for (int a = p_.d - 1; a >= 0; --a) {
                    if (++idx[a] < f_.extent[a]) break;
                    idx[a] = 0;
                }
            }
        }
        return hd_ * vs * sum;
    }

    double operator()(const SpaceTimePoint& pt) const { return (*this)(pt.x.data(), pt.t); }

    const GridFunction& datum() const { return f_; }
    const StableParams& params() const { return p_; }

  private:
    GridFunction f_;
    StableParams p_;
    const StableProfile* prof_;
    double hd_ = 0.0;
};

} // namespace sbm
