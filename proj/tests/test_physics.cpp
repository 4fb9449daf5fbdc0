#include "chnsd/physics.hpp"

#include <doctest.h>

#include <random>

using namespace chnsd;

TEST_CASE("mixture law") {
    CHECK(mixture(1.0, 1.0, 3.0) == 1.0);
    CHECK(mixture(-1.0, 1.0, 3.0) == 3.0);
    CHECK(mixture(2.0, 1.0, 3.0) == 1.0); // clamped overshoot
    CHECK(mixture(-5.0, 1.0, 3.0) == 3.0);
    CHECK(mixture(0.0, 1.0, 3.0) == 2.0);

    // affine and monotone between the clamped endpoints
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double p = uni(rng), q = uni(rng);
        const double mid = mixture(0.5 * (p + q), 2.0, 7.0);
        CHECK(mid == doctest::Approx(0.5 * (mixture(p, 2, 7) + mixture(q, 2, 7))).epsilon(1e-14));
    }
    CHECK(mixture_derivative(0.5, 1.0, 3.0) == -1.0);
    CHECK(mixture_derivative(1.5, 1.0, 3.0) == 0.0);
}

TEST_CASE("sigma is the square root of the mixture density") {
    ModelParams p;
    p.rho1 = 4.0;
    p.rho2 = 4.0;
    CHECK(sigma(1.0, p) == 2.0);
    p.rho1 = p.rho2 = 1.0;
    CHECK(sigma(0.0, p) == 1.0);

    p.rho1 = 1.0;
    p.rho2 = 50.0;
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        const double phi = uni(rng);
        const double s = sigma(phi, p);
        CHECK(std::abs(s * s - mixture(phi, p.rho1, p.rho2)) <= 1e-14 * mixture(phi, p.rho1, p.rho2));
        CHECK(s > 0.0);
    }
}

TEST_CASE("truncated double well") {
    const double eps = 0.25;
    CHECK(double_well_f(0.0, eps) == 0.0);
    CHECK(double_well_f(1.0, eps) == 0.0);
    CHECK(double_well_f(-1.0, eps) == 0.0);
    CHECK(double_well_F(0.0, eps) == doctest::Approx(0.25 / eps).epsilon(1e-15));
    CHECK(double_well_F(1.0, eps) == 0.0);
    CHECK(double_well_F(-1.0, eps) == 0.0);
    CHECK(double_well_f(2.0, eps) == doctest::Approx(2.0 / eps).epsilon(1e-15));

    // finite differences on the quadratic extension reproduce f(2)
    const double h = 1e-5;
    const double fd = (double_well_F(2 + h, eps) - double_well_F(2 - h, eps)) / (2 * h);
    CHECK(fd == doctest::Approx(double_well_f(2.0, eps)).epsilon(1e-9));
}

TEST_CASE("F is nonnegative with globally Lipschitz derivative") {
    const double eps = 0.1;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(-4.0, 4.0);
    for (int k = 0; k < 10000; ++k) {
        const double x = uni(rng), y = uni(rng);
        CHECK(double_well_F(x, eps) >= 0.0);
        if (x != y) {
            const double slope = std::abs(double_well_f(x, eps) - double_well_f(y, eps)) / std::abs(x - y);
            CHECK(slope <= 2.0 / eps + 1e-9);
        }
    }
}

TEST_CASE("central differences of F match f away from the junctions") {
    const double eps = 0.5, h = 1e-6;
    for (int k = 0; k <= 100; ++k) {
        const double x = -2.0 + 4.0 * k / 100.0;
        if (std::abs(std::abs(x) - 1.0) < 2 * h) continue;
        const double fd = (double_well_F(x + h, eps) - double_well_F(x - h, eps)) / (2 * h);
        CHECK(std::abs(fd - double_well_f(x, eps)) <= 1e-8);
    }
    // |F''| <= 2 / eps everywhere
    for (int k = 0; k <= 400; ++k) {
        const double x = -2.0 + k / 100.0;
        CHECK(std::abs(double_well_f_prime(x, eps)) <= 2.0 / eps + 1e-12);
    }
}

TEST_CASE("parameter validation names the violated rule") {
    ModelParams m;
    m.rho1 = 1.0;
    m.rho2 = 1.0;
    SchemeParams s;
    s.xi = 0.0;
    CHECK_THROWS_WITH_AS(s.validate(m), doctest::Contains("xi < zeta + min(rho)/2"), ConfigError);

    ModelParams bad = m;
    bad.epsilon = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = m;
    bad.K << 1.0, 0.5, 0.5, 0.1; // indefinite
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    SchemeParams ok;
    CHECK(ok.zeta_value(m) == doctest::Approx(0.25));
    ok.validate(m);
}
