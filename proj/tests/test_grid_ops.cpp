#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stablebm/grid.hpp"
#include "stablebm/grid_ops.hpp"
#include "stablebm/harmonic_kernel.hpp"
#include "stablebm/quad.hpp"
#include "stablebm/stable_density.hpp"

using namespace sbm;

namespace {

GridFunction bump_grid(int n, double h, double half_support) {
    GridFunction g = GridFunction::centered(1, n, h);
    g.fill([half_support](const double* x) {
        double u = x[0] / half_support;
        return std::fabs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    });
    return g;
}

} // namespace

TEST_CASE("grid containers: geometry, mass, interpolation") {
    GridFunction g = GridFunction::centered(1, 5, 0.5);
    CHECK(g.coordinate(0, 2) == Catch::Approx(0.0).margin(1e-15));
    CHECK(g.coordinate(0, 4) == Catch::Approx(1.0).epsilon(1e-14));
    g.fill([](const double* x) { return x[0]; });
    CHECK(g.at(0) == Catch::Approx(-1.0));
    CHECK(g.mass() == Catch::Approx(0.0).margin(1e-15));
    CHECK(g.interpolate(&g.origin[0]) == Catch::Approx(-1.0));
    double probe = 0.25;
    CHECK(g.interpolate(&probe) == Catch::Approx(0.25).epsilon(1e-13));
    probe = 99.0; // outside => zero extension
    CHECK(g.interpolate(&probe) == 0.0);

    GridFunction q = GridFunction::centered(2, 8, 0.25);
    q.fill([](const double* x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); });
    CHECK(q.max_abs() <= 1.0);
    CHECK(q.l1() == Catch::Approx(q.mass()).epsilon(1e-13));
    double xy[2] = {q.coordinate(0, 3), q.coordinate(1, 5)};
    CHECK(q.interpolate(xy) == Catch::Approx(q.at(3, 5)).epsilon(1e-13));
}

TEST_CASE("periodized kernel: symmetry, positivity, exact unit mass, profile match") {
    // resolved regime: symbol at the Nyquist frequency ~ 7e-7, so lattice
    // values track the continuous density up to the small wraparound
    const double h = 1.0 / 64.0, beta = 0.5, t = 1.0;
    std::vector<int> dims{262144}; // wrap images contribute ~4e-6 at this span
    std::vector<double> k = detail::periodized_kernel(dims, h, beta, t);
    double mass = 0.0;
    for (double v : k) {
        CHECK(v >= 0.0);
        mass += v;
    }
    CHECK(mass * h == Catch::Approx(1.0).epsilon(1e-13));
    for (int j = 1; j < 40; ++j)
        CHECK(k[static_cast<std::size_t>(j)] ==
              Catch::Approx(k[k.size() - static_cast<std::size_t>(j)]).epsilon(1e-12));
    // against the independent inversion/series density route
    StableParams idx{1, beta};
    for (int j : {0, 1, 2, 4, 16, 64}) {
        double r = j * h;
        CHECK(k[static_cast<std::size_t>(j)] ==
              Catch::Approx(stable_density(idx, t, r)).epsilon(1e-4).margin(1e-5));
    }
}

TEST_CASE("stable convolution reproduces the Cauchy semigroup in closed form") {
    // Cauchy(1) * Cauchy(1) = Cauchy(2)
    const double h = 0.05;
    GridFunction f = GridFunction::centered(1, 16001, h);
    f.fill([](const double* x) { return M_1_PI / (x[0] * x[0] + 1.0); });
    GridFunction u = convolve_stable(f, 1.0, 1.0);
    REQUIRE(u.size() == f.size());
    for (double x : {0.0, 0.35, 1.0, 2.5, 5.0}) {
        double expect = M_1_PI * 2.0 / (x * x + 4.0);
        CHECK(u.interpolate(&x) == Catch::Approx(expect).margin(3e-6));
    }
    // mass only leaks outward through the crop, and only by the tail spread
    CHECK(u.mass() <= f.mass() * (1.0 + 1e-12));
    CHECK(f.mass() - u.mass() <= 2.5e-3);
    CHECK(u.max_abs() <= f.max_abs() * (1.0 + 1e-12));
}

TEST_CASE("point-mass convolution recovers the transition density") {
    const double h = 0.05, t = 0.8;
    GridFunction f = GridFunction::centered(1, 8001, h);
    f.values[f.size() / 2] = 1.0 / h; // unit-mass discrete point source
    GridFunction u = convolve_stable(f, 1.0, t);
    for (double x : {0.0, 0.5, 1.5, 4.0}) {
        double expect = M_1_PI * t / (x * x + t * t);
        CHECK(u.interpolate(&x) == Catch::Approx(expect).epsilon(2e-3).margin(1e-6));
    }
}

TEST_CASE("two half-steps agree with one full step") {
    const double h = 0.1;
    GridFunction f = bump_grid(2001, h, 2.0);
    GridFunction one = convolve_stable(f, 0.75, 1.0);
    GridFunction two = convolve_stable(convolve_stable(f, 0.75, 0.5), 0.75, 0.5);
    for (double x : {0.0, 0.7, 1.9}) {
        CHECK(two.interpolate(&x) ==
              Catch::Approx(one.interpolate(&x)).margin(2e-4));
    }
}

TEST_CASE("spectral extension matches the direct kernel sum") {
    // h fine enough that the symbol is ~5e-8 at Nyquist: the spectral kernel
    // then equals the true lattice kernel and the two routes must agree to
    // wraparound accuracy
    StableParams p{1, 1.2};
    const double h = 1.0 / 64.0, t = 0.7;
    GridFunction f = bump_grid(1025, h, 1.0);
    GridFunction u = extend_grid(f, p, t);
    StableParams half_index{1, 0.5 * p.alpha}; // exact density of the extension kernel
    for (int i : {160, 384, 512, 600, 800}) {
        double xi = f.coordinate(0, i);
        double direct = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (f.values[j] == 0.0) continue;
            double r = std::fabs(xi - f.coordinate(0, static_cast<int>(j)));
            direct += f.values[j] * stable_density(half_index, t, r);
        }
        direct *= h;
        CHECK(u.values[static_cast<std::size_t>(i)] ==
              Catch::Approx(direct).margin(3e-6));
    }
}

TEST_CASE("batch extension agrees with single-height extension") {
    StableParams p{1, 1.0};
    GridFunction f = bump_grid(801, 0.05, 1.0);
    std::vector<GridFunction> many = extend_many(f, p, {0.5, 1.0});
    GridFunction a = extend_grid(f, p, 0.5);
    GridFunction b = extend_grid(f, p, 1.0);
    REQUIRE(many.size() == 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        worst = std::max(worst, std::fabs(many[0].values[i] - a.values[i]));
        worst = std::max(worst, std::fabs(many[1].values[i] - b.values[i]));
    }
    CHECK(worst <= 2e-6);
}

TEST_CASE("padding search reports unreachable wraparound budgets") {
    GridFunction f = bump_grid(512, 0.25, 4.0);
    ExtendOptions opt;
    opt.pad_tol = 1e-12;       // hopeless for an index-0.25 kernel tail
    opt.max_total_cells = 4096;
    try {
        convolve_stable(f, 0.25, 1.0, opt);
        FAIL("expected a tolerance failure");
    } catch (const ToleranceError& e) {
        std::string msg = e.what();
        CHECK(msg.find("insufficient padding") != std::string::npos);
        CHECK(e.achieved > 1e-12);
    }
}

TEST_CASE("product transition operator: vertical factor against quadrature") {
    // datum g(x) v(t): the slice masses evolve by the one-dimensional heat
    // kernel on the half-line alone, so adaptive quadrature of that kernel is
    // an independent oracle for the vertical factor.
    StableParams p{1, 1.5};
    const double ht = 0.025, s = 0.1;
    const int nt = 241; // heights 0 .. 6
    GridFunction f2 = GridFunction::centered(1, 705, 0.25);
    std::vector<double> gx(f2.size());
    for (std::size_t i = 0; i < f2.size(); ++i) {
        double x = f2.coordinate(0, static_cast<int>(i));
        gx[i] = std::fabs(x) < 2.0 ? std::cos(M_PI * x / 4.0) : 0.0;
    }
    auto v = [](double t) { return t * t * std::exp(-1.5 * t); };
    for (int k = 0; k < nt; ++k) {
        f2.t_slices.push_back(k * ht);
        std::vector<double> sv(gx);
        for (double& w : sv) w *= v(k * ht);
        f2.slice_values.push_back(std::move(sv));
    }
    double gmass = 0.0;
    for (double w : gx) gmass += w;
    gmass *= f2.spacing;

    auto heat = [s](double u) { return std::exp(-u * u / (4.0 * s)) / std::sqrt(4.0 * M_PI * s); };
    for (bool killed : {true, false}) {
        GridFunction out = apply_heat_semigroup_product(f2, p, s, killed);
        for (double ti : {0.5, 1.0, 2.0, 3.5}) {
            int row = static_cast<int>(std::lround(ti / ht));
            auto integrand = [&](double tp) {
                double w = heat(ti - tp);
                if (killed) w -= heat(ti + tp);
                return v(tp) * w;
            };
            double expect = integrate_gk(integrand, 0.0, 6.0, 1e-10).value * gmass;
            double got = 0.0;
            for (double w : out.slice_values[static_cast<std::size_t>(row)]) got += w;
            got *= f2.spacing;
            CHECK(got == Catch::Approx(expect).margin(5e-4 * std::max(1.0, std::fabs(expect))));
        }
        if (killed) {
            // absorbing boundary: the zero-height row must vanish identically
            for (double w : out.slice_values[0]) CHECK(std::fabs(w) <= 1e-15);
        }
    }
}

TEST_CASE("product transition operator: composition law and row selection") {
    StableParams p{1, 1.5};
    const double ht = 0.05;
    const int nt = 121;
    GridFunction f2 = GridFunction::centered(1, 321, 0.25);
    for (int k = 0; k < nt; ++k) {
        double t = k * ht;
        f2.t_slices.push_back(t);
        std::vector<double> sv(f2.size());
        for (std::size_t i = 0; i < f2.size(); ++i) {
            double x = f2.coordinate(0, static_cast<int>(i));
            double env = std::fabs(x) < 3.0 ? std::exp(-x * x) : 0.0;
            sv[i] = env * t * std::exp(-t);
        }
        f2.slice_values.push_back(std::move(sv));
    }
    GridFunction once = apply_heat_semigroup_product(f2, p, 0.2, true);
    GridFunction half = apply_heat_semigroup_product(f2, p, 0.1, true);
    GridFunction twice = apply_heat_semigroup_product(half, p, 0.1, true);
    double worst = 0.0;
    for (double ti : {0.5, 1.5, 3.0}) {
        std::size_t row = static_cast<std::size_t>(std::lround(ti / ht));
        for (std::size_t i = f2.size() / 4; i < 3 * f2.size() / 4; ++i)
            worst = std::max(worst, std::fabs(once.slice_values[row][i] -
                                              twice.slice_values[row][i]));
    }
    CHECK(worst <= 3e-5);

    // asking for one row reproduces that row of the full application exactly
    int probe = 30;
    GridFunction picked = apply_heat_semigroup_product(f2, p, 0.2, true, {probe});
    REQUIRE(picked.t_slices.size() == 1);
    CHECK(picked.t_slices[0] == f2.t_slices[static_cast<std::size_t>(probe)]);
    for (std::size_t i = 0; i < f2.size(); ++i)
        CHECK(picked.slice_values[0][i] ==
              once.slice_values[static_cast<std::size_t>(probe)][i]);
}

TEST_CASE("product transition operator: short times act as the identity") {
    StableParams p{1, 1.5};
    GridFunction f2 = GridFunction::centered(1, 161, 0.25);
    for (int k = 0; k < 31; ++k) {
        f2.t_slices.push_back(k * 0.1);
        std::vector<double> sv(f2.size());
        for (std::size_t i = 0; i < f2.size(); ++i) {
            double x = f2.coordinate(0, static_cast<int>(i));
            sv[i] = std::exp(-x * x) * std::sin(0.7 * k);
        }
        f2.slice_values.push_back(std::move(sv));
    }
    GridFunction out = apply_heat_semigroup_product(f2, p, 1e-6, true);
    double worst = 0.0;
    for (std::size_t k = 1; k < f2.t_slices.size(); ++k)
        for (std::size_t i = 0; i < f2.size(); ++i)
            worst = std::max(worst, std::fabs(out.slice_values[k][i] - f2.slice_values[k][i]));
    CHECK(worst <= 1e-3);
    for (double w : out.slice_values[0]) CHECK(std::fabs(w) <= 1e-15);
}

TEST_CASE("product transition operator rejects malformed inputs") {
    StableParams p{1, 1.0};
    GridFunction f2 = GridFunction::centered(1, 33, 0.25);
    f2.t_slices = {0.0, 0.1, 0.3}; // non-uniform
    f2.slice_values.assign(3, std::vector<double>(f2.size(), 0.0));
    CHECK_THROWS_AS(apply_heat_semigroup_product(f2, p, 0.1), std::domain_error);
    f2.t_slices = {0.0, 0.1, 0.2};
    CHECK_THROWS_AS(apply_heat_semigroup_product(f2, p, 0.0), std::domain_error);
    GridFunction flat = GridFunction::centered(1, 33, 0.25);
    CHECK_THROWS_AS(apply_heat_semigroup_product(flat, p, 0.1), std::domain_error);
}
