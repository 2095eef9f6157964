#pragma once
// Small statistics toolkit: streaming mean/SE accumulators, Wilson intervals
// for probabilities, a two-sample Kolmogorov-Smirnov test and least squares.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sbm {

// z-quantile for a two-sided confidence level (0.99 -> 2.5758...).
inline double z_for_confidence(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::domain_error("confidence must lie in (0,1)");
    // Acklam's rational approximation of the normal quantile.
    double p = 0.5 * (1.0 + confidence); // upper tail point
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, x;
    if (p < 1.0 - plow) {
        q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    return x;
}

// Point estimate with standard error and sample count.
struct EstimateCI {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    double confidence = 0.99;

    double half_width() const { return z_for_confidence(confidence) * std_error; }
    double lower() const { return mean - half_width(); }
    double upper() const { return mean + half_width(); }
};

class MeanAccumulator {
  public:
    void add(double v) {
        ++n_;
        double delta = v - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (v - mean_);
    }
    void merge(const MeanAccumulator& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) { *this = o; return; }
        double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        double delta = o.mean_ - mean_;
        double n = na + nb;
        m2_ += o.m2_ + delta * delta * na * nb / n;
        mean_ += delta * nb / n;
        n_ += o.n_;
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    EstimateCI estimate(double confidence = 0.99) const {
        EstimateCI e;
        e.mean = mean_;
        e.n = n_;
        e.confidence = confidence;
        e.std_error = n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
        return e;
    }

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Wilson score interval for a binomial proportion; mean is the plain k/n,
// std_error the Wald SE (used for 3-SE comparisons), bounds from Wilson.
struct ProportionCI {
    double p_hat = 0.0;
    double std_error = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t k = 0;
    std::size_t n = 0;
    double confidence = 0.99;
};

inline ProportionCI wilson_ci(std::size_t k, std::size_t n, double confidence = 0.99) {
    if (n == 0) throw std::domain_error("wilson_ci: n must be positive");
    ProportionCI r;
    r.k = k;
    r.n = n;
    r.confidence = confidence;
    double z = z_for_confidence(confidence);
    double nn = static_cast<double>(n);
    double p = static_cast<double>(k) / nn;
    r.p_hat = p;
    r.std_error = std::sqrt(std::max(p * (1.0 - p), 1.0 / nn) / nn);
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    r.lower = std::max(0.0, center - half);
    r.upper = std::min(1.0, center + half);
    return r;
}

// Two-sample Kolmogorov-Smirnov statistic and the fixed-level threshold
// c(level) * sqrt((n+m)/(n m)), c(0.01) = sqrt(-ln(0.005)/2) = 1.6276...
struct KsResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool reject = false;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                              double level = 0.01) {
    if (a.empty() || b.empty()) throw std::domain_error("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double xa = a[i], xb = b[j];
        if (xa <= xb) ++i;
        if (xb <= xa) ++j;
        double diff = std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb);
        d = std::max(d, diff);
    }
    KsResult r;
    r.statistic = d;
    r.threshold = std::sqrt(-0.5 * std::log(0.5 * level)) * std::sqrt((na + nb) / (na * nb));
    r.reject = d > r.threshold;
    return r;
}

// Ordinary least squares y = intercept + slope x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double rms_residual = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::domain_error("fit_line: need two vectors of equal size >= 2");
    std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::domain_error("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    f.slope_se = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
    return f;
}

} // namespace sbm
