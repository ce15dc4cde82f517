#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "bayesgeom/conjugate.hpp"
#include "bayesgeom/errors.hpp"
#include "bayesgeom/geometry.hpp"

using namespace bayesgeom;
using conjugate::beta_field;
using conjugate::normal_field;
using conjugate::uniform_field;

namespace {
constexpr double pi_ = std::numbers::pi;

// Density of c*theta + d when theta has density f on (lo, hi).
ScalarField linear_image(const ScalarField& f, double c, double d, double lo, double hi) {
    return ScalarField::unchecked(
        [f, c, d](std::span<const double> x) {
            const double t = (x[0] - d) / c;
            return f.eval_log(std::span<const double>(&t, 1)) - std::log(c);
        },
        SupportRegion::interval(c * lo + d, c * hi + d));
}

// Density of theta^3 + theta for theta ~ Beta(a, b).
ScalarField cubic_image(double a, double b) {
    const auto f = beta_field(a, b);
    return ScalarField::unchecked(
        [f](std::span<const double> x) {
            const double q = std::sqrt(x[0] * x[0] / 4.0 + 1.0 / 27.0);
            const double t = std::cbrt(x[0] / 2.0 + q) + std::cbrt(x[0] / 2.0 - q);
            return f.eval_log(std::span<const double>(&t, 1)) - std::log(3 * t * t + 1);
        },
        SupportRegion::interval(0, 2));
}
}  // namespace

TEST_CASE("inner products of uniforms") {
    CHECK(inner_product(uniform_field(0, 1), uniform_field(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inner_product(uniform_field(0, 1), uniform_field(1, 2)) == 0.0);
    CHECK(inner_product(uniform_field(0, 1), uniform_field(0, 2)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("norms") {
    CHECK(norm(uniform_field(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(uniform_field(0, 2)) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
    for (double v : {0.3, 1.0, 4.0}) {
        CHECK(norm(normal_field(1.7, v)) == doctest::Approx(std::pow(4 * pi_ * v, -0.25)).epsilon(1e-9));
    }
    CHECK(std::exp(log_norm_sq(beta_field(2, 2))) == doctest::Approx(1.2).epsilon(1e-10));
}

TEST_CASE("compatibility examples") {
    const auto u = compatibility(uniform_field(0, 1), uniform_field(0, 2));
    CHECK(u.kappa == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-10));
    CHECK(u.angle_deg == doctest::Approx(45.0).epsilon(1e-8));
    CHECK(u.inner == doctest::Approx(u.kappa * u.norm_g * u.norm_h).epsilon(1e-12));

    const double m = 2 * std::sqrt(std::log(10.0));
    CHECK(compatibility(normal_field(0, 1), normal_field(m, 1)).kappa == doctest::Approx(0.1).epsilon(1e-8));

    const auto self = compatibility(beta_field(3.44, 22.99), beta_field(3.44, 22.99));
    CHECK(self.kappa == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(self.angle_deg < 1e-3);
    CHECK(std::acos(self.kappa) * 180 / pi_ == self.angle_deg);
}

TEST_CASE("scale invariance and collinearity") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(0.01, 100);
    const auto f = beta_field(2.5, 4), h = beta_field(6, 1.5);
    const double k = compatibility(f, h).kappa;
    for (int i = 0; i < 10; ++i) {
        const double c = u(g), d = u(g);
        CHECK(compatibility(f.scaled(c), h.scaled(d)).kappa == doctest::Approx(k).epsilon(1e-9));
        CHECK(compatibility(f, f.scaled(c)).kappa == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("linear reparametrisation leaves kappa unchanged") {
    const auto f = beta_field(2.5, 4), h = beta_field(6, 1.5);
    const double k = compatibility(f, h).kappa;
    for (auto [c, d] : {std::pair{3.0, -1.0}, std::pair{0.2, 5.0}, std::pair{17.0, 0.0}}) {
        const auto fi = linear_image(f, c, d, 0, 1), hi = linear_image(h, c, d, 0, 1);
        CHECK(compatibility(fi, hi).kappa == doctest::Approx(k).epsilon(1e-8));
    }
}

TEST_CASE("affine compatibility") {
    CHECK(affine_compatibility(beta_field(2, 3), beta_field(2, 3)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(affine_compatibility(uniform_field(0, 1), uniform_field(0, 2)) ==
          doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-10));
    for (double m : {0.5, 1.0, 3.0}) {
        CHECK(affine_compatibility(normal_field(0, 1), normal_field(m, 1)) ==
              doctest::Approx(std::exp(-m * m / 8)).epsilon(1e-8));
    }
    // Hellinger affinity of Betas: B((a1+a2)/2, (b1+b2)/2) / sqrt(B(a1,b1) B(a2,b2))
    const double exact = oracle::beta_fn(3, 2.5) / std::sqrt(oracle::beta_fn(2, 4) * oracle::beta_fn(4, 1));
    CHECK(affine_compatibility(beta_field(2, 4), beta_field(4, 1)) == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("affine compatibility is invariant under theta^3 + theta") {
    for (auto [a1, b1, a2, b2] : {std::array{2.0, 3.0, 5.0, 1.5}, std::array{0.7, 0.9, 3.0, 3.0}}) {
        const double direct = affine_compatibility(beta_field(a1, b1), beta_field(a2, b2));
        const double mapped = affine_compatibility(cubic_image(a1, b1), cubic_image(a2, b2));
        CHECK(mapped == doctest::Approx(direct).epsilon(1e-7));
    }
}

TEST_CASE("local compatibility") {
    // Beta prior on the whole parameter space: local and global agree
    const auto prior = beta_field(3.44, 22.99);
    const auto lik = conjugate::bernoulli_likelihood_field(10, 2);
    CHECK(local_compatibility(prior, lik) == doctest::Approx(compatibility(prior, lik).kappa).epsilon(1e-9));

    // one Gaussian observation y; mu ~ N(m, s^2), sigma ~ Unif(lo, hi)
    const double y = 0.4, m = -0.3, s = 0.8, lo = 0.5, hi = 2.0;
    const auto pi2 = ScalarField(
        [=](std::span<const double> t) {
            return -0.5 * std::log(2 * pi_ * s * s) - 0.5 * (t[0] - m) * (t[0] - m) / (s * s) - std::log(hi - lo);
        },
        SupportRegion({-kInf, lo}, {kInf, hi}));
    const auto ell = ScalarField::unchecked(
        [=](std::span<const double> t) {
            return -0.5 * std::log(2 * pi_ * t[1] * t[1]) - 0.5 * (y - t[0]) * (y - t[0]) / (t[1] * t[1]);
        },
        SupportRegion({-kInf, 0.0}, {kInf, kInf}));
    const double denom = std::sqrt(std::log(hi / lo) / (4 * pi_ * s * (hi - lo)));
    const double inner = oracle::gk(
        [=](double sg) {
            const double v = s * s + sg * sg;
            return std::exp(-0.5 * (y - m) * (y - m) / v) / std::sqrt(2 * pi_ * v) / (hi - lo);
        },
        lo, hi);
    CHECK(local_compatibility(pi2, ell) == doctest::Approx(inner / denom).epsilon(1e-7));

    // disjoint supports
    CHECK(local_compatibility(uniform_field(0, 1), uniform_field(2, 3)) == 0.0);
}

TEST_CASE("pythagoras decomposition") {
    const auto u = pythagoras_check(uniform_field(0, 1), SupportRegion::interval(0, 1));
    CHECK(u.residual < 1e-12);
    CHECK(u.norm_sq == doctest::Approx(1.0));

    const auto b = pythagoras_check(beta_field(2, 2), SupportRegion::interval(0, 1));
    CHECK(b.norm_sq == doctest::Approx(1.2).epsilon(1e-10));
    CHECK(b.distance_sq == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(b.residual <= 1e-8);

    const auto c = pythagoras_check(beta_field(3.44, 22.99), SupportRegion::interval(0, 1));
    const double exact = oracle::beta_fn(2 * 3.44 - 1, 2 * 22.99 - 1) / std::pow(oracle::beta_fn(3.44, 22.99), 2);
    CHECK(c.norm_sq == doctest::Approx(exact).epsilon(1e-9));
    CHECK(c.norm_sq == doctest::Approx(2.17 * 2.17).epsilon(0.005));
    CHECK(c.residual <= 1e-8);

    CHECK_THROWS(pythagoras_check(normal_field(0, 1), SupportRegion::real_line()));
}

TEST_CASE("entropy") {
    CHECK(std::abs(entropy_functional(uniform_field(0, 1))) < 1e-14);
    CHECK(entropy_functional(uniform_field(0, 2)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(entropy_functional(beta_field(2, 2)) == doctest::Approx(oracle::beta_entropy(2, 2)).epsilon(1e-9));
    CHECK(entropy_functional(beta_field(2, 2)) == doctest::Approx(-0.1251).epsilon(1e-3));
    for (double a : {0.8, 3.0, 7.5}) {
        CHECK(entropy_functional(beta_field(a, 1.3)) == doctest::Approx(oracle::beta_entropy(a, 1.3)).epsilon(1e-8));
    }
}

TEST_CASE("norm and entropy move in opposite directions") {
    double prev_n = 0, prev_h = 1;
    for (double a : {1.0, 1.1, 1.25, 1.5, 2.0}) {
        const auto f = beta_field(a, a);
        const double n2 = std::exp(log_norm_sq(f)), h = entropy_functional(f);
        CHECK(n2 > prev_n);
        CHECK(h < prev_h);
        if (a == 1.0) CHECK(n2 == doctest::Approx(1.0 - h).epsilon(1e-12));
        prev_n = n2;
        prev_h = h;
    }
}

TEST_CASE("square integrability is checked") {
    // Beta(0.4, 1) has a non-square-integrable pole at zero
    CHECK_THROWS_AS(ScalarField([](std::span<const double> x) { return -0.6 * std::log(x[0]); },
                                SupportRegion::interval(0, 1)),
                    NotSquareIntegrable);
    CHECK_NOTHROW(ScalarField::unchecked([](std::span<const double> x) { return -0.6 * std::log(x[0]); },
                                         SupportRegion::interval(0, 1)));
    CHECK(to_string(FieldKind::likelihood) == "likelihood");
}
