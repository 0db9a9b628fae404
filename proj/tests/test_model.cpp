#include <doctest.h>

#include <cmath>
#include <random>

#include "hpa/model.hpp"
#include "test_helpers.hpp"

using namespace hpa;

namespace {

// central finite-difference oracle for feedback derivatives
double fd_deriv(const HillFeedback& f, double u, double rel_h = 1e-3) {
    const double h = rel_h * std::max(u, 1.0);
    return (f.value(u + h) - f.value(u - h)) / (2.0 * h);
}

} // namespace

TEST_CASE("Hill feedback evaluation") {
    const HillFeedback f(18.18, 1.0, 2000.0, 6.0);
    CHECK(f.value(0.0) == doctest::Approx(18.18)); // u=0: saturation vanishes
    CHECK(f.value(3055.0) == doctest::Approx(1.3272).epsilon(1e-3 / 1.3272));

    // f2 of the alpha=6 scenario hits 0.0955 at the equilibrium
    const auto p = test::params_alpha6();
    CHECK(p.f2.value(3055.0) == doctest::Approx(0.0955).epsilon(1e-3 / 0.0955));

    CHECK_THROWS_AS(f.value(-1.0), validation_error);
    CHECK_THROWS_AS(HillFeedback(0.0, 1.0, 2000.0, 6.0), validation_error);
    CHECK_THROWS_AS(HillFeedback(1.0, 1.5, 2000.0, 6.0), validation_error);
    CHECK_THROWS_AS(HillFeedback(1.0, 1.0, 2000.0, 0.5), validation_error);
}

TEST_CASE("Hill feedback range and monotonicity") {
    const HillFeedback f(5.0, 0.8, 1500.0, 3.0);
    double prev = f.value(0.0);
    for (int i = 1; i <= 400; ++i) {
        const double u = i * 50.0;
        const double v = f.value(u);
        CHECK(v < prev);
        CHECK(v > f.k() * (1.0 - f.eta()));
        CHECK(v <= f.k());
        prev = v;
    }
}

TEST_CASE("Hill feedback derivative") {
    const HillFeedback f(18.18, 1.0, 2000.0, 6.0);
    CHECK(f.deriv(0.0) == 0.0); // u^{alpha-1} factor vanishes for alpha > 1

    // alpha = 1 keeps a finite slope at the origin: f'(0) = -k eta/c
    const HillFeedback g1(3.0, 0.8, 500.0, 1.0);
    CHECK(g1.deriv(0.0) == doctest::Approx(-3.0 * 0.8 / 500.0));

    // u f'(u)/f(u) at the alpha=6 equilibrium equals -6 u^6/(c^6+u^6)
    const double u = 3055.0;
    const double r = std::pow(u / 2000.0, 6.0);
    const double expected = -6.0 * r / (1.0 + r);
    CHECK(u * f.deriv(u) / f.value(u) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(-5.5622).epsilon(1e-4));

    // at u = c the logarithmic slope is -(alpha/2) * eta/(2-eta), any k
    for (double eta : {0.3, 0.7, 1.0}) {
        const HillFeedback g(7.7, eta, 900.0, 4.0);
        const double lhs = g.c() * g.deriv(g.c()) / g.value(g.c());
        CHECK(lhs == doctest::Approx(-(4.0 / 2.0) * eta / (2.0 - eta)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(f.deriv(-2.0), validation_error);
}

TEST_CASE("derivative matches central finite differences on [1, 1e4]") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ku(0.5, 30.0), eu(0.1, 1.0),
        cu(200.0, 5000.0), au(1.0, 8.0);
    for (int trial = 0; trial < 50; ++trial) {
        const HillFeedback f(ku(rng), eu(rng), cu(rng), au(rng));
        for (double u = 1.0; u <= 1e4; u *= 2.7) {
            const double fd = fd_deriv(f, u, 1e-4);
            const double an = f.deriv(u);
            CHECK(an == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("parameter fit reproduces the reference scenarios") {
    const auto p6 = test::params_alpha6();
    CHECK(p6.k3 == doctest::Approx(1.31985).epsilon(1e-4 / 1.31985));
    CHECK(p6.f1.k() == doctest::Approx(18.18).epsilon(0.01 / 18.18));
    CHECK(p6.f2.k() == doctest::Approx(1.3).epsilon(0.01 / 1.3));

    const auto p3 = test::params_alpha3();
    CHECK(p3.f1.k() == doctest::Approx(5.14).epsilon(0.01 / 5.14));
    CHECK(p3.f2.k() == doctest::Approx(0.36).epsilon(0.01 / 0.36));

    CHECK(p6.w1 == doctest::Approx(std::log(2.0) / 4.0));
    CHECK(p6.w2 == doctest::Approx(std::log(2.0) / 19.9));
    CHECK(p6.w3 == doctest::Approx(std::log(2.0) / 76.4));

    CHECK_THROWS_AS(fit_params(4, 19.9, 76.4, 7.659, 21, 3055, 9.0, 1, 1, 2000),
                    validation_error);
    CHECK_THROWS_AS(fit_params(-4, 19.9, 76.4, 7.659, 21, 3055, 6.0, 1, 1, 2000),
                    validation_error);
}

TEST_CASE("equilibrium of the fitted scenarios") {
    const auto [p, e] = test::scenario_alpha6();
    CHECK(e.x3 == doctest::Approx(3055.0).epsilon(0.01 / 3055.0));
    CHECK(e.x1 == doctest::Approx(7.659).epsilon(1e-8));
    CHECK(e.x2 == doctest::Approx(21.0).epsilon(1e-8));

    // gains against the finite-difference derivative oracle
    const double slope2 = -e.x3 * fd_deriv(p.f2, e.x3, 1e-5) / p.f2.value(e.x3);
    const double slope1 = -e.x3 * fd_deriv(p.f1, e.x3, 1e-5) / p.f1.value(e.x3);
    CHECK(e.a == doctest::Approx(p.w2 * p.w3 * slope2).epsilon(1e-7));
    CHECK(e.b == doctest::Approx(p.w1 * p.w2 * p.w3 * slope1).epsilon(1e-7));
    CHECK(e.a == doctest::Approx(1.758e-3).epsilon(1e-3));
    CHECK(e.b == doctest::Approx(3.046e-4).epsilon(1e-3));

    // alternate forms of the gains
    CHECK(e.a == doctest::Approx(-p.k3 / p.w1 * p.f1.value(e.x3) * p.f2.deriv(e.x3))
                     .epsilon(1e-12));
    CHECK(e.b ==
          doctest::Approx(-p.k3 * p.f1.deriv(e.x3) * p.f2.value(e.x3)).epsilon(1e-12));
}

TEST_CASE("constant-feedback limit has the closed-form fixed point") {
    // with eta, mu -> 0 the feedbacks are constants k1, k2 and
    // x3* = k3 k1 k2/(w1 w2 w3); tiny eta approximates the limit
    const double k1 = 2.0, k2 = 0.5;
    const double tiny = 1e-12;
    SystemParams p{0.2, 0.1, 0.05, 0.7, HillFeedback(k1, tiny, 1e6, 2.0),
                   HillFeedback(k2, tiny, 1e6, 2.0)};
    const auto e = find_equilibrium(p);
    CHECK(e.x3 ==
          doctest::Approx(p.k3 * k1 * k2 / (p.w1 * p.w2 * p.w3)).epsilon(1e-6));
}

TEST_CASE("fit round-trip and positivity over random physiology") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> T(2.0, 120.0), x1d(1.0, 50.0),
        x2d(5.0, 100.0), x3d(500.0, 8000.0), ad(1.0, 8.0), ed(0.05, 1.0),
        cd(200.0, 9000.0);
    for (int i = 0; i < 200; ++i) {
        const double xbar3 = x3d(rng);
        const auto p = fit_params(T(rng), T(rng), T(rng), x1d(rng), x2d(rng), xbar3,
                                  ad(rng), ed(rng), ed(rng), cd(rng));
        const auto e = find_equilibrium(p);
        CHECK(e.x3 == doctest::Approx(xbar3).epsilon(1e-8));
        CHECK(e.a > 0.0);
        CHECK(e.b > 0.0);
        CHECK(std::abs(e.x3 - p.k3 / (p.w1 * p.w2 * p.w3) * p.f1.value(e.x3) *
                                  p.f2.value(e.x3)) <
              1e-10 * p.k3 / (p.w1 * p.w2 * p.w3) * p.f1.value(0.0) * p.f2.value(0.0));
    }
}

TEST_CASE("x - g(x) changes sign exactly once on [0, g(0)]") {
    std::mt19937 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto p = test::random_params(rng);
        const double scale = p.k3 / (p.w1 * p.w2 * p.w3);
        auto g = [&](double x) { return scale * p.f1.value(x) * p.f2.value(x); };
        const double g0 = g(0.0);
        int sign_changes = 0;
        double prev = -g0; // x - g(x) at x = 0
        // 1e4-point grid for a handful of sets, coarser for the bulk
        const int grid = i < 20 ? 10000 : 400;
        for (int k = 1; k <= grid; ++k) {
            const double x = g0 * k / grid;
            const double v = x - g(x);
            if (prev < 0.0 && v >= 0.0)
                ++sign_changes;
            if (prev > 0.0 && v <= 0.0)
                ++sign_changes;
            prev = v;
        }
        CHECK(sign_changes == 1);
    }
}
