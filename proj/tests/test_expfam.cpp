#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "bayesgeom/conjugate.hpp"
#include "bayesgeom/errors.hpp"
#include "bayesgeom/expfam.hpp"

using namespace bayesgeom;
using namespace bayesgeom::expfam;

namespace {
constexpr double pi_ = std::numbers::pi;

// kappa between N(m1, v1) and N(m2, v2)
double gauss_kappa(double m1, double v1, double m2, double v2) {
    return std::sqrt(2 * std::sqrt(v1 * v2) / (v1 + v2)) * std::exp(-(m1 - m2) * (m1 - m2) / (2 * (v1 + v2)));
}

std::vector<double> bernoulli_data(unsigned n, unsigned n1) {
    std::vector<double> y(n, 0.0);
    for (unsigned i = 0; i < n1; ++i) y[i] = 1.0;
    return y;
}
}  // namespace

TEST_CASE("normalising constants") {
    const auto bc = bernoulli_canonical();
    for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{3.44, 22.99}, std::pair{0.3, 0.8}}) {
        CHECK(log_K(bc, {{a}, a + b}) == doctest::Approx(-std::log(oracle::beta_fn(a, b))).epsilon(1e-9));
    }
    const double v = 2.5;
    const auto nk = normal_known_variance(v);
    for (auto [tau, n0] : {std::pair{0.0, 1.0}, std::pair{3.0, 4.0}, std::pair{-1.0, 0.5}}) {
        const double exact = -(0.5 * std::log(2 * pi_ * v / n0) + tau * tau / (2 * n0 * v));
        CHECK(log_K(nk, {{tau}, n0}) == doctest::Approx(exact).epsilon(1e-9));
    }
    // flat member on a bounded space
    CHECK(std::abs(log_K(bernoulli_mean(), {{0.0}, 0.0})) < 1e-12);
}

TEST_CASE("improper members name the failing term") {
    const auto bc = bernoulli_canonical();
    CHECK_THROWS_AS(log_K(bc, {{0.0}, 0.0}), ImproperMember);
    try {
        ef_kappa(bc, {{0.0}, 0.0}, {{2.0}, 10.0}, Pair::prior_lik);
        FAIL("expected ImproperMember");
    } catch (const ImproperMember& e) {
        CHECK(e.term() == "K(2tau, 2n0)");
    }
    CHECK_THROWS_AS(ef_max_compatible(bc, {{0.0}, 0.0}), ImproperMember);
}

TEST_CASE("closed forms match geometry on explicit densities") {
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> ab(0.7, 8.0);
    const auto bc = bernoulli_canonical();
    for (int rep = 0; rep < 6; ++rep) {
        const double a = ab(g), b = ab(g);
        const unsigned n = 2 + rep * 3, n1 = 1 + rep;
        const ConjugateHyper h{{a}, a + b};
        const auto ys = bernoulli_data(n, n1);
        const auto d = summarise(bc, ys);
        const auto prior = ef_member_field(bc, h);
        const auto post = ef_member_field(bc, ef_posterior(h, d), FieldKind::posterior);
        const auto lik = ef_likelihood_field(bc, ys);
        CHECK(ef_kappa(bc, h, d, Pair::prior_lik) == doctest::Approx(compatibility(prior, lik).kappa).epsilon(1e-6));
        CHECK(ef_kappa(bc, h, d, Pair::prior_post) == doctest::Approx(compatibility(prior, post).kappa).epsilon(1e-6));
        CHECK(ef_kappa(bc, h, d, Pair::post_lik) == doctest::Approx(compatibility(post, lik).kappa).epsilon(1e-6));
        CHECK(ef_affine_kappa(bc, h, d, Pair::prior_post) ==
              doctest::Approx(affine_compatibility(prior, post)).epsilon(1e-6));
        CHECK(ef_affine_kappa(bc, h, d, Pair::prior_lik) ==
              doctest::Approx(affine_compatibility(prior, lik)).epsilon(1e-6));
    }

    const double v = 1.7;
    const auto nk = normal_known_variance(v);
    const std::vector<double> ys{0.3, -1.2, 2.0};
    const auto d = summarise(nk, ys);
    const ConjugateHyper h{{1.5}, 0.8};
    const auto prior = ef_member_field(nk, h);
    const auto lik = ef_likelihood_field(nk, ys);
    const auto post = ef_member_field(nk, ef_posterior(h, d));
    CHECK(ef_kappa(nk, h, d, Pair::prior_lik) == doctest::Approx(compatibility(prior, lik).kappa).epsilon(1e-6));
    CHECK(ef_kappa(nk, h, d, Pair::prior_post) == doctest::Approx(compatibility(prior, post).kappa).epsilon(1e-6));
    CHECK(ef_kappa(nk, h, d, Pair::post_lik) == doctest::Approx(compatibility(post, lik).kappa).epsilon(1e-6));
}

TEST_CASE("normal known variance against Gaussian identities") {
    const double v = 1.0;
    const auto nk = normal_known_variance(v);
    const std::vector<double> y{2.2};
    const auto d = summarise(nk, y);
    // prior member (tau, n0) is N(tau/n0, v/n0); likelihood in theta is N(y, v)
    const ConjugateHyper h{{0.0}, 1.0};
    CHECK(ef_kappa(nk, h, d, Pair::prior_lik) == doctest::Approx(std::exp(-2.2 * 2.2 / 4)).epsilon(1e-8));
    CHECK(ef_kappa(nk, h, d, Pair::prior_post) == doctest::Approx(gauss_kappa(0, 1, 1.1, 0.5)).epsilon(1e-8));
    CHECK(ef_affine_kappa(nk, h, d, Pair::prior_lik) == doctest::Approx(std::exp(-2.2 * 2.2 / 8)).epsilon(1e-8));
}

TEST_CASE("Bernoulli in the mean parameter reproduces the Beta closed forms") {
    const auto bm = bernoulli_mean();
    const conjugate::BetaBernoulliModel m{3.44, 22.99, 10, 2};
    const ConjugateHyper h{{m.a - 1}, m.a + m.b - 2};
    const auto d = summarise(bm, bernoulli_data(10, 2));
    CHECK(ef_kappa(bm, h, d, Pair::prior_lik) == doctest::Approx(conjugate::bb_kappa_prior_lik(m)).epsilon(1e-8));
    CHECK(ef_kappa(bm, h, d, Pair::prior_post) == doctest::Approx(conjugate::bb_kappa_prior_post(m)).epsilon(1e-8));
    CHECK(ef_kappa(bm, h, d, Pair::post_lik) == doctest::Approx(conjugate::bb_kappa_lik_post(m)).epsilon(1e-8));

    // halved terms exist where doubled ones do not: Beta(0.4, 3)
    const ConjugateHyper loose{{-0.6}, 1.4};
    CHECK_THROWS_AS(ef_kappa(bm, loose, d, Pair::prior_post), ImproperMember);
    const double aff = ef_affine_kappa(bm, loose, d, Pair::prior_post);
    const double exact = oracle::beta_fn(1.4, 7) / std::sqrt(oracle::beta_fn(0.4, 3) * oracle::beta_fn(2.4, 11));
    CHECK(aff == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("max-compatible member") {
    const auto bc = bernoulli_canonical();
    const auto d = summarise(bc, bernoulli_data(10, 2));
    const auto h = ef_max_compatible(bc, d);
    CHECK(h.tau == std::vector<double>{2.0});
    CHECK(h.n0 == 10.0);
    CHECK(ef_kappa(bc, h, d, Pair::prior_lik) == doctest::Approx(1.0).epsilon(1e-8));

    const auto nk = normal_known_variance(0.5);
    const std::vector<double> ys{1.0, 2.5, 0.2, 1.7};
    const auto dn = summarise(nk, ys);
    const auto hn = ef_max_compatible(nk, dn);
    CHECK(hn.tau[0] / hn.n0 == doctest::Approx(1.35));
    CHECK(ef_kappa(nk, hn, dn, Pair::prior_lik) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("max-compatible member is the grid argmax") {
    const auto bc = bernoulli_canonical();
    const auto d = summarise(bc, bernoulli_data(10, 2));
    double best = -1, bt = 0, bn = 0, best_aff = -1, at = 0, an = 0;
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double tau = 0.5 + 0.25 * i, n0 = 5.0 + 0.5 * j;  // contains (2, 10)
            if (n0 <= tau) continue;
            const double k = ef_kappa(bc, {{tau}, n0}, d, Pair::prior_lik);
            const double ka = ef_affine_kappa(bc, {{tau}, n0}, d, Pair::prior_lik);
            if (k > best) best = k, bt = tau, bn = n0;
            if (ka > best_aff) best_aff = ka, at = tau, an = n0;
        }
    }
    CHECK(bt == 2.0);
    CHECK(bn == 10.0);
    CHECK(at == 2.0);
    CHECK(an == 10.0);
    CHECK(best_aff == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("conjugacy closure") {
    const auto nk = normal_known_variance(1.3);
    const std::vector<double> ys{0.4, 1.9, -0.6};
    const ConjugateHyper h{{0.7}, 2.0};
    const auto prior = ef_member_field(nk, h);
    const auto lik = ef_likelihood_field(nk, ys);
    const auto post = ef_posterior(h, summarise(nk, ys));
    const double lz = log_inner_product(prior, lik);
    const double lk = log_K(nk, post);
    for (double t : {-1.0, 0.0, 0.8, 2.5}) {
        const std::span<const double> x(&t, 1);
        const double from_product = prior.eval_log(x) + lik.eval_log(x) - lz;
        const double from_member = ef_member_field(nk, post).eval_log(x) + lk;
        CHECK(std::exp(from_member) == doctest::Approx(std::exp(from_product)).epsilon(1e-8));
    }
}

TEST_CASE("names and validation") {
    CHECK(builtin("bernoulli-canonical").name == "bernoulli-canonical");
    CHECK(builtin("normal-known-variance", 3.0).name == "normal-known-variance");
    CHECK_THROWS_AS(builtin("poisson"), ValidationError);
    for (auto p : {Pair::prior_lik, Pair::prior_post, Pair::post_lik}) CHECK(pair_from_string(to_string(p)) == p);
    CHECK_THROWS_AS(pair_from_string("lik_lik"), ValidationError);

    auto wide = bernoulli_canonical();
    wide.q = 4;
    CHECK_THROWS(wide.validate());
    CHECK_THROWS(log_K(bernoulli_canonical(), {{1.0, 2.0}, 3.0}));
}
