#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "bayesgeom/conjugate.hpp"

using namespace bayesgeom;
using namespace bayesgeom::conjugate;

namespace {
const BetaBernoulliModel a0{3.44, 22.99, 10, 2};
const NIGParams midge{1.9, 1, 1, 0.01};
}  // namespace

TEST_CASE("model validation") {
    CHECK_NOTHROW(a0.validate());
    CHECK(a0.a_post() == doctest::Approx(5.44));
    CHECK(a0.b_post() == doctest::Approx(30.99));
    try {
        BetaBernoulliModel{0.4, 2, 3, 1}.validate();
        FAIL("expected an error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("exceed 1/2") != std::string::npos);
    }
    CHECK_THROWS(BetaBernoulliModel{1, 1, 3, 4}.validate());
    CHECK_THROWS(beta_norm(0.5, 2));
}

TEST_CASE("Beta-Bernoulli norms") {
    CHECK(bb_prior_norm({1, 1, 10, 2}) == 1.0);
    CHECK(bb_prior_norm(a0) == doctest::Approx(2.17).epsilon(0.005 / 2.17));
    CHECK(bb_prior_norm({40, 300, 10, 2}) == doctest::Approx(4.03).epsilon(0.005 / 4.03));
    CHECK(bb_posterior_norm({1, 1, 10, 2}) == doctest::Approx(1.55).epsilon(0.005 / 1.55));
    CHECK(bb_posterior_norm(a0) == doctest::Approx(2.24).epsilon(0.005 / 2.24));
    CHECK(bb_posterior_norm({40, 300, 10, 2}) == doctest::Approx(4.04).epsilon(0.005 / 4.04));
    CHECK(bb_posterior_norm(a0) == beta_norm(5.44, 30.99));

    CHECK(bb_likelihood_norm({1, 1, 10, 2}) == doctest::Approx(45 * std::sqrt(oracle::beta_fn(5, 17))).epsilon(1e-12));
    CHECK(bb_likelihood_norm({1, 1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(bb_likelihood_norm({1, 1, 2, 1}) == doctest::Approx(2 * std::sqrt(1.0 / 30)).epsilon(1e-12));
}

TEST_CASE("Beta-Bernoulli compatibilities") {
    CHECK(bb_kappa_prior_lik(a0) == doctest::Approx(0.69).epsilon(0.01 / 0.69));
    CHECK(bb_kappa_prior_lik({3, 9, 10, 2}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bb_kappa_prior_post(a0) == doctest::Approx(0.95).epsilon(0.01 / 0.95));
    CHECK(bb_kappa_prior_post({2.5, 4, 0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bb_kappa_prior_prior(1, 1, 1, 1) == 1.0);
    CHECK(bb_kappa_prior_prior(1, 1, 2, 2) == doctest::Approx(std::sqrt(30.0) / 6).epsilon(1e-12));
    CHECK(bb_kappa_prior_prior(1.3, 7, 4, 2.2) == bb_kappa_prior_prior(4, 2.2, 1.3, 7));
    // the likelihood and the posterior of a flat prior coincide
    CHECK(bb_kappa_lik_post({1, 1, 10, 2}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed forms agree with quadrature") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> ab(0.6, 15.0);
    std::uniform_int_distribution<unsigned> nn(0, 30);
    for (int rep = 0; rep < 20; ++rep) {
        const unsigned n = nn(g);
        const BetaBernoulliModel m{ab(g), ab(g), n, std::uniform_int_distribution<unsigned>(0, n)(g)};
        const auto prior = beta_field(m.a, m.b);
        const auto post = beta_field(m.a_post(), m.b_post(), FieldKind::posterior);
        const auto lik = bernoulli_likelihood_field(m.n, m.n1);
        CHECK(bb_prior_norm(m) == doctest::Approx(norm(prior)).epsilon(1e-8));
        CHECK(bb_posterior_norm(m) == doctest::Approx(norm(post)).epsilon(1e-8));
        CHECK(bb_likelihood_norm(m) == doctest::Approx(norm(lik)).epsilon(1e-8));
        CHECK(bb_kappa_prior_lik(m) == doctest::Approx(compatibility(prior, lik).kappa).epsilon(1e-8));
        CHECK(bb_kappa_prior_post(m) == doctest::Approx(compatibility(prior, post).kappa).epsilon(1e-8));
        CHECK(bb_kappa_lik_post(m) == doctest::Approx(compatibility(lik, post).kappa).epsilon(1e-8));
    }
}

TEST_CASE("maximiser over the hyperparameter grid") {
    double best = -1, ba = 0, bb = 0;
    for (int i = 3; i <= 60; ++i) {
        for (int j = 3; j <= 60; ++j) {
            const double a = 0.2 * i, b = 0.2 * j;
            const double k = bb_kappa_prior_lik({a, b, 10, 2});
            if (k > best) best = k, ba = a, bb = b;
        }
    }
    CHECK(ba == doctest::Approx(3.0));
    CHECK(bb == doctest::Approx(9.0));
    CHECK(best == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("max-compatible Beta prior") {
    const auto h = bb_max_compatible(10, 2);
    CHECK(h.a == 3.0);
    CHECK(h.b == 9.0);
    const auto e = bb_max_compatible(10, 0);
    CHECK(e.a == 1.0);
    CHECK(e.b == 11.0);
    CHECK(beta_mode(e.a, e.b) == 0.0);
    const auto s = bb_max_compatible(4, 2);
    CHECK(beta_mode(s.a, s.b) == 0.5);
    CHECK(bb_kappa_prior_lik({e.a, e.b, 10, 0}) == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 g(13);
    for (int rep = 0; rep < 50; ++rep) {
        const unsigned n = std::uniform_int_distribution<unsigned>(1, 200)(g);
        const unsigned n1 = std::uniform_int_distribution<unsigned>(0, n)(g);
        const auto m = bb_max_compatible(n, n1);
        CHECK(beta_mode(m.a, m.b) == doctest::Approx(double(n1) / n).epsilon(1e-14));
        CHECK(bb_kappa_prior_lik({m.a, m.b, n, n1}) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("NIG density and update") {
    CHECK(nig_log_density({0, 1, 2, 1}, 0, 1) ==
          doctest::Approx(-0.5 * std::log(2 * std::numbers::pi) - 1.0).epsilon(1e-14));

    const auto p = nig_posterior({0, 1, 1, 1}, 1, 2.0, 0.0);
    CHECK(p.mu0 == doctest::Approx(1.0));
    CHECK(p.eta0 == 2.0);
    CHECK(p.nu0 == 2.0);
    CHECK(p.sigma0sq == doctest::Approx(1.5));

    const auto agree = nig_posterior(midge, 5, midge.mu0, 0.0);
    CHECK(agree.mu0 == doctest::Approx(midge.mu0));
    CHECK(agree.sigma0sq == doctest::Approx(midge.nu0 * midge.sigma0sq / (midge.nu0 + 5)));

    const auto l = nig_likelihood_as_nig(9, 1.804, 0.135);
    CHECK(l.mu0 == 1.804);
    CHECK(l.eta0 == 9.0);
    CHECK(l.nu0 == 6.0);
    CHECK(l.sigma0sq == doctest::Approx(0.0225));
    CHECK(nig_kappa(l, l) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(nig_likelihood_as_nig(3, 1.0, 1.0));
    CHECK_THROWS(NIGParams{0, -1, 1, 1}.validate());
}

TEST_CASE("NIG compatibilities") {
    const auto post = nig_posterior(midge, 9, 1.804, 0.135);
    const double k = nig_kappa(midge, post);
    CHECK(k == doctest::Approx(0.28).epsilon(0.01 / 0.28));
    CHECK(nig_kappa(midge, midge) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k == doctest::Approx(compatibility(nig_field(midge), nig_field(post)).kappa).epsilon(1e-6));

    // prior-likelihood through the collinear NIG
    const auto lik_nig = nig_likelihood_as_nig(9, 1.804, 0.135);
    const double kl = compatibility(nig_field(midge), normal_likelihood_field(9, 1.804, 0.135)).kappa;
    CHECK(nig_kappa(midge, lik_nig) == doctest::Approx(kl).epsilon(1e-6));

    std::mt19937_64 g(21);
    std::uniform_real_distribution<double> mu(-1, 1), pos(0.5, 4);
    for (int rep = 0; rep < 5; ++rep) {
        const NIGParams p1{mu(g), pos(g), pos(g) + 1, pos(g)}, p2{mu(g), pos(g), pos(g) + 1, pos(g)};
        const double kq = compatibility(nig_field(p1), nig_field(p2)).kappa;
        CHECK(nig_kappa(p1, p2) == doctest::Approx(kq).epsilon(1e-6));
        CHECK(nig_kappa(p1, p2) == doctest::Approx(nig_kappa(p2, p1)).epsilon(1e-10));
    }
}

TEST_CASE("canonical Beta norm") {
    CHECK(canonical_beta_norm(1, 1) == doctest::Approx(1 / std::sqrt(6.0)).epsilon(1e-12));
    const double v = canonical_beta_norm(0.75, 0.75);
    CHECK(std::isfinite(v));
    CHECK(v == doctest::Approx(norm(canonical_beta_field(0.75, 0.75))).epsilon(1e-8));
}
