#include "bayesgeom/expfam.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bayesgeom/errors.hpp"

namespace bayesgeom::expfam {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vector axpy(double alpha, const Vector& x, double beta, const Vector& y) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = alpha * x[i] + beta * y[i];
    return out;
}

// Exponent tau' eta(theta) - n0 A(eta(theta)).
double member_log_kernel(const ExpFamSpec& spec, const ConjugateHyper& h, std::span<const double> theta) {
    const Vector eta = spec.eta_of_theta(theta);
    const double a = spec.log_cumulant(eta);
    if (!std::isfinite(a)) return -kInf;
    double out = dot(h.tau, eta);
    if (h.n0 != 0.0) out -= h.n0 * a;
    return out;
}

void check_dims(const ExpFamSpec& spec, const ConjugateHyper& h) {
    if (h.tau.size() != spec.q) {
        throw std::invalid_argument("expfam: tau has dimension " + std::to_string(h.tau.size()) +
                                    ", family " + spec.name + " needs " + std::to_string(spec.q));
    }
}

struct Term {
    ConjugateHyper hyper;
    const char* name;
};

double log_ratio(const ExpFamSpec& spec, const Term& num1, const Term& num2, const Term& den,
                 const QuadSpec& quad) {
    const double l1 = log_K(spec, num1.hyper, quad, num1.name);
    const double l2 = log_K(spec, num2.hyper, quad, num2.name);
    const double l3 = log_K(spec, den.hyper, quad, den.name);
    return std::exp(0.5 * (l1 + l2) - l3);
}

}  // namespace

void ExpFamSpec::validate() const {
    if (!log_h || !suff_stat || !log_cumulant || !eta_of_theta) {
        throw std::invalid_argument("ExpFamSpec " + name + ": all functions must be set");
    }
    if (q < 1 || q > 3) {
        throw std::invalid_argument("ExpFamSpec " + name +
                                    ": sufficient statistic dimension must be 1..3 (quadrature limit)");
    }
    if (theta_support.dim() > 3) {
        throw std::invalid_argument("ExpFamSpec " + name + ": parameter dimension must be at most 3");
    }
}

SufficientData summarise(const ExpFamSpec& spec, std::span<const double> ys) {
    SufficientData d;
    d.sum_t.assign(spec.q, 0.0);
    for (double y : ys) {
        const Vector t = spec.suff_stat(y);
        for (std::size_t i = 0; i < spec.q; ++i) d.sum_t[i] += t[i];
    }
    d.n = static_cast<double>(ys.size());
    return d;
}

double log_K(const ExpFamSpec& spec, const ConjugateHyper& h, const QuadSpec& quad,
             const std::string& term_name) {
    spec.validate();
    check_dims(spec, h);
    const auto integrand = [&](std::span<const double> theta) {
        return member_log_kernel(spec, h, theta);
    };
    LogQuadResult r;
    try {
        r = log_integrate(integrand, spec.theta_support, quad);
    } catch (const NumericalError& e) {
        throw ImproperMember(term_name, term_name + " is undefined for family " + spec.name + ": " + e.what());
    }
    if (!r.converged || r.log_value == kInf || r.log_value == -kInf) {
        throw ImproperMember(term_name, term_name + " is undefined for family " + spec.name +
                                            " (normalizing integral diverges or vanishes)");
    }
    return -r.log_value;
}

double ef_kappa(const ExpFamSpec& spec, const ConjugateHyper& h, const SufficientData& data, Pair which,
                const QuadSpec& quad) {
    check_dims(spec, h);
    const Vector& s = data.sum_t;
    const double n = data.n;
    const Vector& t = h.tau;
    switch (which) {
        case Pair::prior_lik:
            return log_ratio(spec, {{axpy(2, t, 0, t), 2 * h.n0}, "K(2tau, 2n0)"},
                             {{axpy(2, s, 0, s), 2 * n}, "K(2S, 2n)"},
                             {{axpy(1, t, 1, s), h.n0 + n}, "K(tau + S, n0 + n)"}, quad);
        case Pair::prior_post:
            return log_ratio(spec, {{axpy(2, t, 0, t), 2 * h.n0}, "K(2tau, 2n0)"},
                             {{axpy(2, t, 2, s), 2 * (h.n0 + n)}, "K(2(tau + S), 2(n0 + n))"},
                             {{axpy(2, t, 1, s), 2 * h.n0 + n}, "K(2tau + S, 2n0 + n)"}, quad);
        case Pair::post_lik:
            return log_ratio(spec, {{axpy(2, t, 2, s), 2 * (h.n0 + n)}, "K(2(tau + S), 2(n0 + n))"},
                             {{axpy(2, s, 0, s), 2 * n}, "K(2S, 2n)"},
                             {{axpy(1, t, 2, s), h.n0 + 2 * n}, "K(tau + 2S, n0 + 2n)"}, quad);
    }
    throw std::invalid_argument("ef_kappa: unknown pair");
}

double ef_affine_kappa(const ExpFamSpec& spec, const ConjugateHyper& h, const SufficientData& data,
                       Pair which, const QuadSpec& quad) {
    check_dims(spec, h);
    const Vector& s = data.sum_t;
    const double n = data.n;
    const Vector& t = h.tau;
    switch (which) {
        case Pair::prior_lik:
            return log_ratio(spec, {h, "K(tau, n0)"}, {{s, n}, "K(S, n)"},
                             {{axpy(0.5, t, 0.5, s), 0.5 * (h.n0 + n)}, "K((tau + S)/2, (n0 + n)/2)"},
                             quad);
        case Pair::prior_post:
            return log_ratio(spec, {h, "K(tau, n0)"}, {{axpy(1, t, 1, s), h.n0 + n}, "K(tau + S, n0 + n)"},
                             {{axpy(1, t, 0.5, s), h.n0 + 0.5 * n}, "K(tau + S/2, n0 + n/2)"}, quad);
        case Pair::post_lik:
            return log_ratio(spec, {{axpy(1, t, 1, s), h.n0 + n}, "K(tau + S, n0 + n)"}, {{s, n}, "K(S, n)"},
                             {{axpy(0.5, t, 1, s), 0.5 * h.n0 + n}, "K(tau/2 + S, n0/2 + n)"}, quad);
    }
    throw std::invalid_argument("ef_affine_kappa: unknown pair");
}

ConjugateHyper ef_max_compatible(const ExpFamSpec& spec, const SufficientData& data, const QuadSpec& quad) {
    ConjugateHyper h{data.sum_t, data.n};
    log_K(spec, h, quad, "K(S, n)");
    return h;
}

ConjugateHyper ef_posterior(const ConjugateHyper& h, const SufficientData& data) {
    if (h.tau.size() != data.sum_t.size()) throw std::invalid_argument("ef_posterior: dimension mismatch");
    return {axpy(1, h.tau, 1, data.sum_t), h.n0 + data.n};
}

ScalarField ef_member_field(const ExpFamSpec& spec, const ConjugateHyper& h, FieldKind kind) {
    spec.validate();
    check_dims(spec, h);
    return ScalarField(
        [spec, h](std::span<const double> theta) { return member_log_kernel(spec, h, theta); },
        spec.theta_support, kind);
}

ScalarField ef_likelihood_field(const ExpFamSpec& spec, std::span<const double> ys) {
    spec.validate();
    const SufficientData d = summarise(spec, ys);
    double log_h_sum = 0.0;
    for (double y : ys) log_h_sum += spec.log_h(y);
    const ConjugateHyper kernel{d.sum_t, d.n};
    return ScalarField(
        [spec, kernel, log_h_sum](std::span<const double> theta) {
            const double k = member_log_kernel(spec, kernel, theta);
            return k == -kInf ? -kInf : log_h_sum + k;
        },
        spec.theta_support, FieldKind::likelihood);
}

// ---------------------------------------------------------------------------

ExpFamSpec bernoulli_canonical() {
    ExpFamSpec s{
        "bernoulli-canonical",
        [](double) { return 0.0; },
        [](double y) { return Vector{y}; },
        [](std::span<const double> eta) { return softplus(eta[0]); },
        [](std::span<const double> theta) { return Vector{theta[0]}; },
        SupportRegion::real_line(),
        1,
    };
    return s;
}

ExpFamSpec bernoulli_mean() {
    ExpFamSpec s{
        "bernoulli-mean",
        [](double) { return 0.0; },
        [](double y) { return Vector{y}; },
        [](std::span<const double> eta) { return softplus(eta[0]); },
        [](std::span<const double> theta) { return Vector{std::log(theta[0]) - std::log1p(-theta[0])}; },
        SupportRegion::interval(0.0, 1.0),
        1,
    };
    return s;
}

ExpFamSpec normal_known_variance(double variance) {
    if (!(variance > 0.0)) throw std::domain_error("normal_known_variance: variance must be positive");
    ExpFamSpec s{
        "normal-known-variance",
        [variance](double y) { return -0.5 * std::log(2.0 * std::numbers::pi * variance) - 0.5 * y * y / variance; },
        [](double y) { return Vector{y}; },
        [variance](std::span<const double> eta) { return 0.5 * variance * eta[0] * eta[0]; },
        [variance](std::span<const double> theta) { return Vector{theta[0] / variance}; },
        SupportRegion::real_line(),
        1,
    };
    return s;
}

ExpFamSpec builtin(const std::string& name, double variance) {
    if (name == "bernoulli-canonical") return bernoulli_canonical();
    if (name == "bernoulli-mean") return bernoulli_mean();
    if (name == "normal-known-variance") return normal_known_variance(variance);
    throw ValidationError("unknown exponential family '" + name +
                          "' (expected bernoulli-canonical, bernoulli-mean or normal-known-variance)");
}

std::string to_string(Pair which) {
    switch (which) {
        case Pair::prior_lik: return "prior_lik";
        case Pair::prior_post: return "prior_post";
        case Pair::post_lik: return "post_lik";
    }
    return "?";
}

Pair pair_from_string(const std::string& name) {
    if (name == "prior_lik") return Pair::prior_lik;
    if (name == "prior_post") return Pair::prior_post;
    if (name == "post_lik") return Pair::post_lik;
    throw ValidationError("unknown compatibility pair '" + name + "'");
}

}  // namespace bayesgeom::expfam
