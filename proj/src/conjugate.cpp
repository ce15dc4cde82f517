#include "bayesgeom/conjugate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bayesgeom::conjugate {

namespace {

void require_half(double a, double b, const char* where) {
    if (!(a > 0.5) || !(b > 0.5)) {
        throw std::domain_error(std::string(where) +
                                ": Beta hyperparameters must exceed 1/2 for the norm to exist "
                                "(B(2a-1, 2b-1) is undefined otherwise); got a=" +
                                std::to_string(a) + ", b=" + std::to_string(b));
    }
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_beta_norm(double a, double b) { return 0.5 * log_beta(2 * a - 1, 2 * b - 1) - log_beta(a, b); }

}  // namespace

void BetaBernoulliModel::validate() const {
    require_half(a, b, "BetaBernoulliModel");
    if (n1 > n) throw std::domain_error("BetaBernoulliModel: n1 must not exceed n");
}

double beta_norm(double a, double b) {
    require_half(a, b, "beta_norm");
    return std::exp(log_beta_norm(a, b));
}

double bb_prior_norm(const BetaBernoulliModel& m) {
    m.validate();
    return beta_norm(m.a, m.b);
}

double bb_posterior_norm(const BetaBernoulliModel& m) {
    m.validate();
    return beta_norm(m.a_post(), m.b_post());
}

double bb_likelihood_norm(const BetaBernoulliModel& m) {
    if (m.n1 > m.n) throw std::domain_error("bb_likelihood_norm: n1 must not exceed n");
    const unsigned n0 = m.n - m.n1;
    return std::exp(log_binomial(m.n, m.n1) + 0.5 * log_beta(2.0 * m.n1 + 1, 2.0 * n0 + 1));
}

double bb_kappa_prior_lik(const BetaBernoulliModel& m) {
    m.validate();
    const unsigned n0 = m.n - m.n1;
    const double lk = log_beta(m.a_post(), m.b_post()) -
                      0.5 * (log_beta(2 * m.a - 1, 2 * m.b - 1) + log_beta(2.0 * m.n1 + 1, 2.0 * n0 + 1));
    return std::exp(lk);
}

double bb_kappa_prior_post(const BetaBernoulliModel& m) {
    m.validate();
    return bb_kappa_prior_prior(m.a, m.b, m.a_post(), m.b_post());
}

double bb_kappa_lik_post(const BetaBernoulliModel& m) {
    m.validate();
    // The likelihood is proportional to a Beta(n1 + 1, n - n1 + 1) density.
    return bb_kappa_prior_prior(m.n1 + 1.0, (m.n - m.n1) + 1.0, m.a_post(), m.b_post());
}

double bb_kappa_prior_prior(double a1, double b1, double a2, double b2) {
    require_half(a1, b1, "bb_kappa_prior_prior");
    require_half(a2, b2, "bb_kappa_prior_prior");
    const double lk = log_beta(a1 + a2 - 1, b1 + b2 - 1) -
                      0.5 * (log_beta(2 * a1 - 1, 2 * b1 - 1) + log_beta(2 * a2 - 1, 2 * b2 - 1));
    return std::exp(lk);
}

BetaHyper bb_max_compatible(unsigned n, unsigned n1) {
    if (n1 > n) throw std::domain_error("bb_max_compatible: n1 must not exceed n");
    return {1.0 + n1, 1.0 + (n - n1)};
}

double beta_mode(double a, double b) {
    if (!(a >= 1.0) || !(b >= 1.0) || !(a + b > 2.0)) {
        throw std::domain_error("beta_mode: needs a, b >= 1 and a + b > 2");
    }
    return (a - 1.0) / (a + b - 2.0);
}

// ---------------------------------------------------------------------------

void NIGParams::validate() const {
    if (!std::isfinite(mu0) || !(eta0 > 0.0) || !(nu0 > 0.0) || !(sigma0sq > 0.0) ||
        !std::isfinite(eta0) || !std::isfinite(nu0) || !std::isfinite(sigma0sq)) {
        throw std::domain_error("NIGParams: need finite mu0 and eta0, nu0, sigma0sq > 0 (got " +
                                std::to_string(mu0) + ", " + std::to_string(eta0) + ", " +
                                std::to_string(nu0) + ", " + std::to_string(sigma0sq) + ")");
    }
}

double nig_log_density(const NIGParams& p, double mu, double sigmasq) {
    p.validate();
    if (!(sigmasq > 0.0)) throw std::domain_error("nig_log_density: sigma^2 must be positive");
    const double shape = 0.5 * p.nu0;
    const double rate = 0.5 * p.nu0 * p.sigma0sq;
    const double d = mu - p.mu0;
    const double log_normal =
        -0.5 * std::log(2.0 * std::numbers::pi * sigmasq / p.eta0) - 0.5 * p.eta0 * d * d / sigmasq;
    const double log_ig =
        shape * std::log(rate) - log_gamma(shape) - (shape + 1.0) * std::log(sigmasq) - rate / sigmasq;
    return log_normal + log_ig;
}

NIGComposites nig_composites(const NIGParams& p1, const NIGParams& p2) {
    p1.validate();
    p2.validate();
    NIGComposites out;
    out.a = {p1.mu0, 2 * p1.eta0, 2 * p1.nu0 + 3, p1.nu0 * p1.sigma0sq / (p1.nu0 + 1.5)};
    out.b = {p2.mu0, 2 * p2.eta0, 2 * p2.nu0 + 3, p2.nu0 * p2.sigma0sq / (p2.nu0 + 1.5)};
    const double eta = p1.eta0 + p2.eta0;
    const double nu = p1.nu0 + p2.nu0 + 3;
    const double dm = p1.mu0 - p2.mu0;
    const double scale = (p1.nu0 * p1.sigma0sq + p2.nu0 * p2.sigma0sq + p1.eta0 * p2.eta0 * dm * dm / eta) / nu;
    out.c = {(p1.eta0 * p1.mu0 + p2.eta0 * p2.mu0) / eta, eta, nu, scale};
    out.a.validate();
    out.b.validate();
    out.c.validate();
    return out;
}

double nig_kappa(const NIGParams& p1, const NIGParams& p2) {
    const auto c = nig_composites(p1, p2);
    const double lk = 0.5 * (nig_log_density(c.a, 0.0, 1.0) + nig_log_density(c.b, 0.0, 1.0)) -
                      nig_log_density(c.c, 0.0, 1.0);
    return std::exp(lk);
}

NIGParams nig_posterior(const NIGParams& p, unsigned n, double ybar, double ss) {
    p.validate();
    if (n < 1) throw std::domain_error("nig_posterior: need at least one observation");
    if (!(ss >= 0.0)) throw std::domain_error("nig_posterior: ss must be nonnegative");
    NIGParams out;
    out.eta0 = p.eta0 + n;
    out.mu0 = (n * ybar + p.eta0 * p.mu0) / out.eta0;
    out.nu0 = p.nu0 + n;
    const double d = p.mu0 - ybar;
    out.sigma0sq = (p.nu0 * p.sigma0sq + ss + p.eta0 * n / out.eta0 * d * d) / out.nu0;
    return out;
}

NIGParams nig_likelihood_as_nig(unsigned n, double ybar, double ss) {
    if (n <= 3) {
        throw std::domain_error(
            "nig_likelihood_as_nig: need n > 3 for the likelihood to match a proper NIG member");
    }
    if (!(ss > 0.0)) throw std::domain_error("nig_likelihood_as_nig: ss must be positive");
    return {ybar, static_cast<double>(n), n - 3.0, ss / (n - 3.0)};
}

double canonical_beta_norm(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::domain_error("canonical_beta_norm: a and b must be positive");
    }
    return std::exp(0.5 * log_beta(2 * a, 2 * b) - log_beta(a, b));
}

// ---------------------------------------------------------------------------

ScalarField beta_field(double a, double b, FieldKind kind) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta_field: a, b must be positive");
    const double lb = log_beta(a, b);
    Breakpoints cuts;
    if (a > 1.0 && b > 1.0) cuts = {{(a - 1.0) / (a + b - 2.0)}};
    return ScalarField(
        [a, b, lb](std::span<const double> x) {
            const double t = x[0];
            return (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - lb;
        },
        SupportRegion::interval(0.0, 1.0), kind, cuts);
}

ScalarField bernoulli_likelihood_field(unsigned n, unsigned n1, bool with_binomial) {
    if (n1 > n) throw std::domain_error("bernoulli_likelihood_field: n1 must not exceed n");
    const double lc = with_binomial ? log_binomial(n, n1) : 0.0;
    const double k1 = n1, k0 = n - n1;
    Breakpoints cuts;
    if (n > 0) cuts = {{k1 / n}};
    return ScalarField(
        [k1, k0, lc](std::span<const double> x) {
            const double t = x[0];
            double l = lc;
            if (k1 > 0) l += k1 * std::log(t);
            if (k0 > 0) l += k0 * std::log1p(-t);
            return l;
        },
        SupportRegion::interval(0.0, 1.0), FieldKind::likelihood, cuts);
}

ScalarField nig_field(const NIGParams& p, FieldKind kind) {
    p.validate();
    const double mode_s2 = p.nu0 * p.sigma0sq / (p.nu0 + 3.0);
    return ScalarField([p](std::span<const double> x) { return nig_log_density(p, x[0], x[1]); },
                       SupportRegion({-kInf, 0.0}, {kInf, kInf}), kind, {{p.mu0}, {mode_s2}});
}

ScalarField normal_likelihood_field(unsigned n, double ybar, double ss) {
    if (n < 1) throw std::domain_error("normal_likelihood_field: need n >= 1");
    const double nn = n;
    const double mode_s2 = ss > 0.0 ? ss / nn : 1.0;
    return ScalarField(
        [nn, ybar, ss](std::span<const double> x) {
            const double mu = x[0], s2 = x[1];
            const double d = ybar - mu;
            return -0.5 * nn * std::log(2.0 * std::numbers::pi * s2) - (ss + nn * d * d) / (2.0 * s2);
        },
        SupportRegion({-kInf, 0.0}, {kInf, kInf}), FieldKind::likelihood, {{ybar}, {mode_s2}});
}

ScalarField canonical_beta_field(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("canonical_beta_field: a, b must be positive");
    const double lb = log_beta(a, b);
    return ScalarField(
        [a, b, lb](std::span<const double> x) { return a * x[0] - (a + b) * softplus(x[0]) - lb; },
        SupportRegion::real_line(), FieldKind::prior, {{std::log(a / b)}});
}

ScalarField normal_field(double mean, double variance, FieldKind kind) {
    if (!(variance > 0.0)) throw std::domain_error("normal_field: variance must be positive");
    const double c = -0.5 * std::log(2.0 * std::numbers::pi * variance);
    return ScalarField(
        [mean, variance, c](std::span<const double> x) {
            const double d = x[0] - mean;
            return c - 0.5 * d * d / variance;
        },
        SupportRegion::real_line(), kind, {{mean}});
}

ScalarField uniform_field(double lower, double upper, FieldKind kind) {
    const double l = -std::log(upper - lower);
    return ScalarField([l](std::span<const double>) { return l; }, SupportRegion::interval(lower, upper),
                       kind);
}

}  // namespace bayesgeom::conjugate
