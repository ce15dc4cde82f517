#pragma once

#include <utility>

#include "bayesgeom/geometry.hpp"

namespace bayesgeom::conjugate {

/// Beta(a, b) prior with n Bernoulli trials of which n1 succeeded.
/// Posterior hyperparameters are always derived, never stored.
struct BetaBernoulliModel {
    double a = 1.0;
    double b = 1.0;
    unsigned n = 0;
    unsigned n1 = 0;

    double a_post() const noexcept { return a + n1; }
    double b_post() const noexcept { return b + (n - n1); }

    /// Throws std::domain_error unless a, b > 1/2 and n1 <= n. The prior
    /// norm needs B(2a-1, 2b-1) to exist.
    void validate() const;
};

/// ||Beta(a,b)|| = B(2a-1, 2b-1)^{1/2} / B(a,b); a, b > 1/2.
double beta_norm(double a, double b);

double bb_prior_norm(const BetaBernoulliModel& m);
/// Norm of the posterior Beta(a*, b*).
double bb_posterior_norm(const BetaBernoulliModel& m);
/// (n choose n1) B(2 n1 + 1, 2(n - n1) + 1)^{1/2}.
double bb_likelihood_norm(const BetaBernoulliModel& m);
double bb_kappa_prior_lik(const BetaBernoulliModel& m);
double bb_kappa_prior_post(const BetaBernoulliModel& m);
double bb_kappa_lik_post(const BetaBernoulliModel& m);
double bb_kappa_prior_prior(double a1, double b1, double a2, double b2);

struct BetaHyper {
    double a;
    double b;
};

/// (1 + n1, 1 + n - n1): the Beta prior collinear to the likelihood.
BetaHyper bb_max_compatible(unsigned n, unsigned n1);

/// Mode (a-1)/(a+b-2) of Beta(a, b) for a, b >= 1, a + b > 2.
double beta_mode(double a, double b);

// ---------------------------------------------------------------------------
// Normal-Inverse-Gamma
// ---------------------------------------------------------------------------

/// mu | sigma^2 ~ N(mu0, sigma^2/eta0), sigma^2 ~ IG(nu0/2, sigma0sq nu0/2).
struct NIGParams {
    double mu0 = 0.0;
    double eta0 = 1.0;
    double nu0 = 1.0;
    double sigma0sq = 1.0;

    void validate() const;
};

double nig_log_density(const NIGParams& p, double mu, double sigmasq);

/// kappa between two NIG densities, through the three composite NIG
/// members A, B, C evaluated at (mu, sigma^2) = (0, 1).
double nig_kappa(const NIGParams& p1, const NIGParams& p2);

/// The composite members used by nig_kappa, exposed for inspection.
struct NIGComposites {
    NIGParams a;
    NIGParams b;
    NIGParams c;
};
NIGComposites nig_composites(const NIGParams& p1, const NIGParams& p2);

/// Conjugate update from n observations with mean ybar and sum of squared
/// deviations ss.
NIGParams nig_posterior(const NIGParams& p, unsigned n, double ybar, double ss);

/// NIG(ybar, n, n - 3, ss/(n - 3)), whose density is proportional to the
/// Normal likelihood in (mu, sigma^2). Requires n > 3 and ss > 0.
NIGParams nig_likelihood_as_nig(unsigned n, double ybar, double ss);

/// Norm of the log-odds conjugate prior exp{a eta - (a+b) log(1+e^eta)}/B(a,b):
/// B(2a, 2b)^{1/2} / B(a, b), defined for all a, b > 0.
double canonical_beta_norm(double a, double b);

// ---------------------------------------------------------------------------
// Explicit densities for the quadrature oracle
// ---------------------------------------------------------------------------

ScalarField beta_field(double a, double b, FieldKind kind = FieldKind::prior);
/// theta^n1 (1-theta)^(n-n1), optionally times (n choose n1).
ScalarField bernoulli_likelihood_field(unsigned n, unsigned n1, bool with_binomial = true);
/// Density over (mu, sigma^2).
ScalarField nig_field(const NIGParams& p, FieldKind kind = FieldKind::prior);
/// Normal likelihood over (mu, sigma^2) for n observations summarised by
/// (ybar, ss).
ScalarField normal_likelihood_field(unsigned n, double ybar, double ss);
/// Density of the log-odds of a Beta(a, b) variable.
ScalarField canonical_beta_field(double a, double b);
/// N(mean, variance) density in one dimension.
ScalarField normal_field(double mean, double variance, FieldKind kind = FieldKind::generic);
/// Uniform density on (lower, upper).
ScalarField uniform_field(double lower, double upper, FieldKind kind = FieldKind::generic);

}  // namespace bayesgeom::conjugate
