#pragma once
// Square functions of the harmonic extension on the half-space lattice.
//
// For boundary data f with layers f_t = (extension at height t):
//   vertical    G(x)^2 = integral of t (d/dt f_t(x))^2 dt,
//   horizontal  G(x)^2 = integral of t Gamma(f_t)(x) dt,
// with Gamma the nonlocal quadratic-variation density (carre.hpp) and the
// truncated horizontal variant cutting the jump integral at |h| < t^{2/alpha}.
// The t-integral runs over a geometric grid with trapezoid weights in log t,
// so the combined square function splits exactly into the two parts on shared
// nodes. One-dimensional boundary data throughout.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "carre.hpp"
#include "grid.hpp"
#include "grid_ops.hpp"
#include "maximal.hpp"
#include "params.hpp"
#include "quad.hpp"

namespace sbm {

// Quadrature for integrals of the form \int phi(t) t dt: geometric nodes,
// trapezoid rule in u = log t (so t dt = t^2 du).
struct TGrid {
    std::vector<double> nodes;
    std::vector<double> weights; // integral ~ sum weights[k] * phi(nodes[k])
};

inline TGrid make_t_grid(double t_min = 1e-3, double t_max = 10.0, int n = 60) {
    if (!(t_min > 0.0) || !(t_max > t_min) || n < 2)
        throw std::domain_error("make_t_grid: need 0 < t_min < t_max, n >= 2");
    TGrid tg;
    const double du = std::log(t_max / t_min) / (n - 1);
    for (int k = 0; k < n; ++k) {
        double t = t_min * std::exp(du * k);
        double w = t * t * du * ((k == 0 || k == n - 1) ? 0.5 : 1.0);
        tg.nodes.push_back(t);
        tg.weights.push_back(w);
    }
    return tg;
}

// Both parts of the pointwise square-function density over (x, height):
// gamma_part holds Gamma(f_t), vertical_part holds (d/dt f_t)^2.
struct SquareFunctionField {
    GridFunction gamma_part;
    GridFunction vertical_part;
};

struct GFunctionResult {
    GridFunction values;
    std::string kind; // "vertical" | "horizontal-full" | "horizontal-truncated"
    std::map<double, double> p_norms;
};

namespace detail {

// Height derivatives by centered differences on the (uneven) height grid,
// one-sided at the two ends.
inline std::vector<std::vector<double>>
height_derivatives(const std::vector<GridFunction>& slices,
                   const std::vector<double>& t) {
    std::size_t nt = slices.size(), nx = slices.front().values.size();
    std::vector<std::vector<double>> df(nt, std::vector<double>(nx));
    for (std::size_t k = 0; k < nt; ++k) {
        std::size_t lo = k == 0 ? 0 : k - 1;
        std::size_t hi = k + 1 == nt ? k : k + 1;
        double dt = t[hi] - t[lo];
        for (std::size_t i = 0; i < nx; ++i)
            df[k][i] = (slices[hi].values[i] - slices[lo].values[i]) / dt;
    }
    return df;
}

inline GridFunction horizontal_from_slices(const std::vector<GridFunction>& slices,
                                           const TGrid& tg, const StableParams& p,
                                           bool truncated,
                                           const CarreOptions& copt) {
    GridFunction out = slices.front();
    std::vector<double> acc(out.values.size(), 0.0);
    for (std::size_t k = 0; k < tg.nodes.size(); ++k) {
        CarreOptions ck = copt;
        if (truncated)
            ck.cut_radius = std::pow(tg.nodes[k], 2.0 / p.alpha);
        GridFunction g = carre_du_champ(slices[k], p, ck);
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += tg.weights[k] * g.values[i];
    }
    for (std::size_t i = 0; i < acc.size(); ++i)
        out.values[i] = std::sqrt(std::max(0.0, acc[i]));
    return out;
}

inline void attach_norms(GFunctionResult& r, const std::vector<double>& p_list) {
    for (double p : p_list) r.p_norms[p] = lp_norm(r.values, p);
}

} // namespace detail

inline SquareFunctionField build_square_field(const GridFunction& f,
                                              const StableParams& p,
                                              const TGrid& tg,
                                              const CarreOptions& copt = {},
                                              const ExtendOptions& eopt = {}) {
    auto slices = extend_many(f, p, tg.nodes, eopt);
    auto df = detail::height_derivatives(slices, tg.nodes);
    SquareFunctionField field;
    field.gamma_part = f;
    field.gamma_part.values.clear();
    field.gamma_part.t_slices = tg.nodes;
    field.vertical_part = field.gamma_part;
    for (std::size_t k = 0; k < slices.size(); ++k) {
        field.gamma_part.slice_values.push_back(
            carre_du_champ(slices[k], p, copt).values);
        auto& v = df[k];
        for (double& x : v) x *= x;
        field.vertical_part.slice_values.push_back(std::move(v));
    }
    field.gamma_part.validate();
    field.vertical_part.validate();
    return field;
}

// Combined square function from a precomputed field:
// G(x) = sqrt( integral of t (gamma_part + vertical_part)(x, t) dt ).
inline GridFunction g_function_from_field(const SquareFunctionField& field,
                                          const TGrid& tg) {
    field.gamma_part.validate();
    field.vertical_part.validate();
    if (field.gamma_part.t_slices != tg.nodes ||
        field.vertical_part.t_slices != tg.nodes)
        throw std::domain_error("g_function_from_field: height grids disagree");
    GridFunction out = field.gamma_part;
    out.t_slices.clear();
    out.slice_values.clear();
    out.values.assign(field.gamma_part.slice_values.front().size(), 0.0);
    for (std::size_t k = 0; k < tg.nodes.size(); ++k)
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += tg.weights[k] *
                             (field.gamma_part.slice_values[k][i] +
                              field.vertical_part.slice_values[k][i]);
    for (double& v : out.values) v = std::sqrt(std::max(0.0, v));
    return out;
}

// Vertical square function; tail_tol bounds the fraction of the largest
// G^2 value carried by the final height node (a proxy for the discarded
// integral beyond the height window).
inline GFunctionResult vertical_g(const GridFunction& f, const StableParams& p,
                                  const TGrid& tg,
                                  const std::vector<double>& p_list = {},
                                  const ExtendOptions& eopt = {},
                                  double tail_tol = HUGE_VAL) {
    auto slices = extend_many(f, p, tg.nodes, eopt);
    auto df = detail::height_derivatives(slices, tg.nodes);
    GFunctionResult r;
    r.kind = "vertical";
    r.values = f;
    std::vector<double> acc(f.values.size(), 0.0);
    double last = 0.0, biggest = 0.0;
    std::size_t nt = tg.nodes.size();
    for (std::size_t k = 0; k < nt; ++k)
        for (std::size_t i = 0; i < acc.size(); ++i) {
            double c = tg.weights[k] * df[k][i] * df[k][i];
            acc[i] += c;
            if (k + 1 == nt) last = std::max(last, c);
        }
    for (std::size_t i = 0; i < acc.size(); ++i) {
        biggest = std::max(biggest, acc[i]);
        r.values.values[i] = std::sqrt(std::max(0.0, acc[i]));
    }
    if (biggest > 0.0 && last / biggest > tail_tol)
        throw ToleranceError("height-window tail estimate " +
                                 std::to_string(last / biggest) +
                                 " exceeds tolerance",
                             last / biggest);
    detail::attach_norms(r, p_list);
    return r;
}

inline GFunctionResult horizontal_g(const GridFunction& f, const StableParams& p,
                                    const TGrid& tg, bool truncated,
                                    const std::vector<double>& p_list = {},
                                    const CarreOptions& copt = {},
                                    const ExtendOptions& eopt = {}) {
    auto slices = extend_many(f, p, tg.nodes, eopt);
    GFunctionResult r;
    r.kind = truncated ? "horizontal-truncated" : "horizontal-full";
    r.values = detail::horizontal_from_slices(slices, tg, p, truncated, copt);
    detail::attach_norms(r, p_list);
    return r;
}

struct MeyerCheck {
    double lhs = 0.0;   // ||f||_p^p
    double rhs = 0.0;   // majorant integral
    double c_hat = 0.0; // lhs / rhs
};

// For strictly positive data and p in (1, 2): compares ||f||_p^p against
//   integral over x, t, h of t * max(f_t(x), f_t(x+h))^{p-2}
//                            * [f_t(x+h)-f_t(x)]^2 * (c/2)|h|^{-1-alpha},
// the quantity that controls the horizontal square function for small p.
inline MeyerCheck meyer_majorant_check(const GridFunction& f,
                                       const StableParams& p, double p_exp,
                                       const TGrid& tg, double epsilon = 1e-12,
                                       const ExtendOptions& eopt = {}) {
    p.validate();
    f.validate();
    if (p.d != 1 || f.d != 1)
        throw std::domain_error("meyer_majorant_check: one-dimensional data only");
    if (!f.t_slices.empty())
        throw std::domain_error("meyer_majorant_check: single layer required");
    if (!(p_exp > 1.0) || !(p_exp < 2.0))
        throw std::domain_error("meyer_majorant_check: p must lie in (1, 2)");
    if (!(epsilon > 0.0))
        throw std::domain_error("meyer_majorant_check: epsilon must be > 0");
    for (double v : f.values)
        if (!(v >= epsilon))
            throw std::domain_error(
                "meyer_majorant_check: datum must be bounded below by epsilon");
    const int n = f.extent[0];
    const double sp = f.spacing;
    const double half_c = 0.5 * levy_constant(1, p.alpha);
    const detail::CarreCellWeights cells =
        detail::carre_cells(p.alpha, sp, n, HUGE_VAL);
    auto slices = extend_many(f, p, tg.nodes, eopt);
    MeyerCheck mc;
    mc.lhs = std::pow(lp_norm(f, p_exp), p_exp);
    double rhs = 0.0;
    for (std::size_t k = 0; k < tg.nodes.size(); ++k) {
        const std::vector<double>& ft = slices[k].values;
        double layer = 0.0;
        for (int i = 0; i < n; ++i) {
            const double fx = ft[static_cast<std::size_t>(i)];
            double slope;
            if (i == 0)
                slope = (ft[1] - ft[0]) / sp;
            else if (i == n - 1)
                slope = (ft[static_cast<std::size_t>(n - 1)] -
                         ft[static_cast<std::size_t>(n - 2)]) /
                        sp;
            else
                slope = (ft[static_cast<std::size_t>(i + 1)] -
                         ft[static_cast<std::size_t>(i - 1)]) /
                        (2.0 * sp);
            double acc =
                cells.inner * slope * slope * std::pow(fx, p_exp - 2.0);
            for (int sign : {-1, 1}) {
                int reach = sign < 0 ? i : n - 1 - i;
                for (int j = 1; j <= reach; ++j) {
                    double fy = ft[static_cast<std::size_t>(i + sign * j)];
                    double d = fy - fx;
                    acc += cells.w[static_cast<std::size_t>(j)] *
                           std::pow(std::max(fx, fy), p_exp - 2.0) * d * d;
                }
            }
            layer += acc;
        }
        rhs += tg.weights[k] * layer;
    }
    mc.rhs = half_c * rhs * sp;
    mc.c_hat = mc.rhs > 0.0 ? mc.lhs / mc.rhs : 0.0;
    return mc;
}

struct NamedDatum {
    std::string name;
    GridFunction f;
};

// Rough-and-smooth boundary family used by the small-p experiments:
// an indicator, a Gaussian bump, a signed difference of bumps, and a
// heavy-tailed power profile, all on the same window.
inline std::vector<NamedDatum> standard_datum_family(int n, double spacing) {
    std::vector<NamedDatum> fam;
    auto base = GridFunction::centered(1, n, spacing);
    NamedDatum ind{"indicator", base};
    NamedDatum gauss{"gauss-bump", base};
    NamedDatum diff{"bump-difference", base};
    NamedDatum heavy{"heavy-tail", base};
    for (int i = 0; i < n; ++i) {
        double x = base.coordinate(0, i);
        std::size_t ii = static_cast<std::size_t>(i);
        ind.f.values[ii] = std::fabs(x) <= 1.0 ? 1.0 : 0.0;
        gauss.f.values[ii] = std::exp(-0.5 * x * x);
        diff.f.values[ii] = std::exp(-0.5 * (x - 2.0) * (x - 2.0) / 0.64) -
                            std::exp(-0.5 * (x + 2.0) * (x + 2.0) / 0.64);
        heavy.f.values[ii] = std::min(1.0, std::pow(std::fabs(x), -1.25));
    }
    fam.push_back(std::move(ind));
    fam.push_back(std::move(gauss));
    fam.push_back(std::move(diff));
    fam.push_back(std::move(heavy));
    return fam;
}

struct GfRatioRow {
    std::string name;
    double p = 0.0;
    double f_norm = 0.0;
    double ratio_truncated = 0.0; // ||truncated horizontal G||_p / ||f||_p
    double ratio_full = 0.0;      // recorded, not gated
};

struct GfRatioTable {
    std::vector<GfRatioRow> rows;
    std::map<double, double> max_ratio; // per p, over the truncated variant
};

inline GfRatioTable gf_ratio_experiment(const std::vector<NamedDatum>& family,
                                        const StableParams& p,
                                        const std::vector<double>& p_list,
                                        const TGrid& tg,
                                        const CarreOptions& copt = {},
                                        const ExtendOptions& eopt = {}) {
    GfRatioTable table;
    for (const auto& datum : family) {
        auto slices = extend_many(datum.f, p, tg.nodes, eopt);
        GridFunction g_trunc =
            detail::horizontal_from_slices(slices, tg, p, true, copt);
        GridFunction g_full =
            detail::horizontal_from_slices(slices, tg, p, false, copt);
        for (double q : p_list) {
            GfRatioRow row;
            row.name = datum.name;
            row.p = q;
            row.f_norm = lp_norm(datum.f, q);
            if (!(row.f_norm > 0.0))
                throw std::domain_error("gf_ratio_experiment: datum '" +
                                        datum.name + "' has zero norm");
            row.ratio_truncated = lp_norm(g_trunc, q) / row.f_norm;
            row.ratio_full = lp_norm(g_full, q) / row.f_norm;
            auto it = table.max_ratio.find(q);
            if (it == table.max_ratio.end())
                table.max_ratio[q] = row.ratio_truncated;
            else
                it->second = std::max(it->second, row.ratio_truncated);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

} // namespace sbm
