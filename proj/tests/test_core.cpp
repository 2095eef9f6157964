#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stablebm/params.hpp"
#include "stablebm/rng.hpp"
#include "stablebm/samplers.hpp"
#include "stablebm/stats.hpp"

using namespace sbm;

TEST_CASE("jump kernel constant matches the characteristic-function normalization") {
    // closed forms: 1/pi in d=1 and 1/(2 pi) in d=2 at alpha=1
    CHECK(levy_constant(1, 1.0) == Catch::Approx(0.3183098861837907).epsilon(1e-12));
    CHECK(levy_constant(2, 1.0) == Catch::Approx(0.15915494309189535).epsilon(1e-12));
    for (int d : {1, 2, 3})
        for (double a : {0.3, 0.5, 1.0, 1.5, 1.9})
            CHECK(levy_constant(d, a) > 0.0);
    CHECK_THROWS_AS(levy_constant(1, 2.0), std::domain_error);
    CHECK_THROWS_AS(levy_constant(0, 1.0), std::domain_error);
    // expected big-jump rate: c(1,1) * int_{|u|>1} u^-2 du = (1/pi)*2
    CHECK(jump_rate_beyond(1, 1.0, 1.0) == Catch::Approx(2.0 / M_PI).epsilon(1e-12));
    // R-dependence R^{-alpha}
    CHECK(jump_rate_beyond(1, 1.0, 2.0) ==
          Catch::Approx(0.5 * jump_rate_beyond(1, 1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("rng streams are reproducible and key-dependent") {
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::vector<std::uint64_t> va, vb;
    bool same_c = true, same_d = true;
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t x = a.next_u64();
        va.push_back(x);
        vb.push_back(b.next_u64());
        if (c.next_u64() != x) same_c = false;
        if (d.next_u64() != x) same_d = false;
    }
    CHECK(va == vb);      // bitwise identical for identical keys
    CHECK_FALSE(same_c);  // stream id matters
    CHECK_FALSE(same_d);  // master seed matters

    // re-created stream reproduces the sequence from the start
    RngStream e(42, 7);
    for (int i = 0; i < 1000; ++i) REQUIRE(e.next_u64() == va[i]);
}

TEST_CASE("rng uniform and gaussian moments") {
    RngStream r(1234, 0);
    MeanAccumulator u, u2, g, g2;
    for (int i = 0; i < 200000; ++i) {
        double x = r.next_double();
        u.add(x);
        u2.add(x * x);
        double n = r.next_gaussian();
        g.add(n);
        g2.add(n * n);
    }
    auto eu = u.estimate(), eu2 = u2.estimate(), eg = g.estimate(), eg2 = g2.estimate();
    CHECK(std::fabs(eu.mean - 0.5) < 3 * eu.std_error);
    CHECK(std::fabs(eu2.mean - 1.0 / 3.0) < 3 * eu2.std_error);
    CHECK(std::fabs(eg.mean) < 3 * eg.std_error);
    CHECK(std::fabs(eg2.mean - 1.0) < 3 * eg2.std_error);
}

TEST_CASE("distinct streams decorrelated") {
    RngStream a(99, 1), b(99, 2);
    MeanAccumulator prod;
    for (int i = 0; i < 100000; ++i) {
        double x = a.next_double() - 0.5, y = b.next_double() - 0.5;
        prod.add(x * y);
    }
    auto e = prod.estimate();
    CHECK(std::fabs(e.mean) < 3 * e.std_error);
}

TEST_CASE("subordinator increments: positivity, Laplace transform, median") {
    RngStream r(2024, 0);
    // Laplace transform E exp(-lambda S) = exp(-dt lambda^beta)
    for (double beta : {0.25, 0.5, 0.75}) {
        for (double dt : {0.5, 1.0}) {
            MeanAccumulator acc[3];
            const double lambdas[3] = {0.5, 1.0, 2.0};
            for (int i = 0; i < 40000; ++i) {
                double s = sample_subordinator_increment(beta, dt, r);
                REQUIRE(s > 0.0);
                for (int j = 0; j < 3; ++j) acc[j].add(std::exp(-lambdas[j] * s));
            }
            for (int j = 0; j < 3; ++j) {
                auto e = acc[j].estimate();
                double target = std::exp(-dt * std::pow(lambdas[j], beta));
                INFO("beta=" << beta << " dt=" << dt << " lambda=" << lambdas[j]);
                CHECK(std::fabs(e.mean - target) < 3 * e.std_error);
            }
        }
    }
    // beta=1/2, dt=1: S is the absorption time from height 1, whose median
    // solves erfc(1/(2 sqrt s)) = 1/2  =>  s = 1.099054 (frozen)
    std::vector<double> s;
    s.reserve(100000);
    RngStream rm(2025, 0);
    for (int i = 0; i < 100000; ++i)
        s.push_back(sample_subordinator_increment(0.5, 1.0, rm));
    std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
    double med = s[s.size() / 2];
    CHECK(std::fabs(med - 1.099054) < 0.03); // 3 * SE(median) ~ 0.024 at n=1e5
    // mean of exp(-S) = exp(-1)
    MeanAccumulator lap;
    RngStream rl(2026, 0);
    for (int i = 0; i < 100000; ++i)
        lap.add(std::exp(-sample_subordinator_increment(0.5, 1.0, rl)));
    auto el = lap.estimate();
    CHECK(std::fabs(el.mean - std::exp(-1.0)) < 3 * el.std_error);
}

TEST_CASE("stable increments: tail probability, characteristic function, symmetry") {
    StableParams p1{1, 1.0};
    RngStream r(7, 0);
    double y[1];
    std::size_t beyond = 0;
    MeanAccumulator sign_acc, cf05, cf1, cf2;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        sample_stable_increment(p1, 1.0, r, y);
        if (std::fabs(y[0]) > 1.0) ++beyond;
        sign_acc.add(y[0] > 0 ? 1.0 : -1.0);
        cf05.add(std::cos(0.5 * y[0]));
        cf1.add(std::cos(1.0 * y[0]));
        cf2.add(std::cos(2.0 * y[0]));
    }
    // standard Cauchy: P(|Y| > 1) = 1/2
    auto tail = wilson_ci(beyond, n);
    CHECK(std::fabs(tail.p_hat - 0.5) < 3 * tail.std_error);
    auto es = sign_acc.estimate();
    CHECK(std::fabs(es.mean) < 3 * es.std_error);
    // E cos(xi Y) = exp(-|xi|) for alpha = 1, dt = 1
    struct { MeanAccumulator* a; double xi; } probes[] = {{&cf05, 0.5}, {&cf1, 1.0}, {&cf2, 2.0}};
    for (auto& pr : probes) {
        auto e = pr.a->estimate();
        CHECK(std::fabs(e.mean - std::exp(-pr.xi)) < 3 * e.std_error);
    }

    // d = 2, alpha = 0.7, dt = 0.5: E cos(xi . Y) = exp(-dt |xi|^alpha)
    StableParams p2{2, 0.7};
    RngStream r2(8, 0);
    double y2[2];
    MeanAccumulator cf;
    for (int i = 0; i < 60000; ++i) {
        sample_stable_increment(p2, 0.5, r2, y2);
        cf.add(std::cos(0.8 * y2[0] + 0.6 * y2[1])); // |xi| = 1
    }
    auto e2 = cf.estimate();
    CHECK(std::fabs(e2.mean - std::exp(-0.5)) < 3 * e2.std_error);
}

TEST_CASE("stable increments scale in law: KS at the 1% level") {
    StableParams p{1, 1.2};
    RngStream ra(11, 0), rb(11, 1);
    std::vector<double> a, b;
    double y[1];
    const double c = 4.0, dt = 0.25;
    for (int i = 0; i < 5000; ++i) {
        sample_stable_increment(p, c * dt, ra, y);
        a.push_back(y[0]);
        sample_stable_increment(p, dt, rb, y);
        b.push_back(std::pow(c, 1.0 / p.alpha) * y[0]);
    }
    auto ks = ks_two_sample(a, b, 0.01);
    CHECK_FALSE(ks.reject);
}

TEST_CASE("brownian increments: variance 2 dt and sign balance") {
    RngStream r(3, 0);
    MeanAccumulator v;
    std::size_t pos = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double z = sample_brownian_increment(0.7, r);
        v.add(z * z);
        if (z > 0) ++pos;
    }
    auto ev = v.estimate();
    CHECK(std::fabs(ev.mean - 1.4) < 3 * ev.std_error);
    auto ep = wilson_ci(pos, n);
    CHECK(std::fabs(ep.p_hat - 0.5) < 3 * ep.std_error);
}

TEST_CASE("statistics toolkit sanity") {
    CHECK(z_for_confidence(0.99) == Catch::Approx(2.5758293).margin(2e-4));
    CHECK(z_for_confidence(0.95) == Catch::Approx(1.9599640).margin(2e-4));

    // SE shrinks like n^{-1/2}
    RngStream r(5, 0);
    MeanAccumulator small, large;
    for (int i = 0; i < 2000; ++i) small.add(r.next_gaussian());
    RngStream r2(5, 0);
    for (int i = 0; i < 8000; ++i) large.add(r2.next_gaussian());
    double ratio = small.estimate().std_error / large.estimate().std_error;
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.4);

    // merge equals one-pass
    MeanAccumulator x, ya, yb;
    RngStream r3(6, 0);
    for (int i = 0; i < 1000; ++i) {
        double v = r3.next_double();
        x.add(v);
        (i < 500 ? ya : yb).add(v);
    }
    ya.merge(yb);
    CHECK(ya.mean() == Catch::Approx(x.mean()).epsilon(1e-12));
    CHECK(ya.variance() == Catch::Approx(x.variance()).epsilon(1e-10));

    auto w = wilson_ci(1, 20000);
    CHECK(w.lower > 0.0); // a single hit is already significant at 99%
    CHECK(wilson_ci(0, 100).lower == 0.0);

    // identical distributions: KS accepts (fixed seed)
    RngStream rk(9, 0);
    std::vector<double> a, b;
    for (int i = 0; i < 3000; ++i) a.push_back(rk.next_gaussian());
    for (int i = 0; i < 3000; ++i) b.push_back(rk.next_gaussian());
    CHECK_FALSE(ks_two_sample(a, b, 0.01).reject);

    // exact line recovery
    std::vector<double> lx = {0, 1, 2, 3, 4}, ly;
    for (double v : lx) ly.push_back(2.5 * v - 1.0);
    auto f = fit_line(lx, ly);
    CHECK(f.slope == Catch::Approx(2.5).margin(1e-12));
    CHECK(f.intercept == Catch::Approx(-1.0).margin(1e-12));
    CHECK(f.rms_residual < 1e-12);
}
