#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bayesgeom/geometry.hpp"

namespace bayesgeom::expfam {

using Vector = std::vector<double>;

/// f_theta(y) = h(y) exp{eta(theta)' T(y) - A(eta(theta))} for scalar y.
///
/// The conjugate normalizers integrate over theta_support with the tensor
/// quadrature rule, so both the parameter dimension and q = dim T are capped
/// at 3.
struct ExpFamSpec {
    std::string name;
    std::function<double(double)> log_h;
    std::function<Vector(double)> suff_stat;
    std::function<double(std::span<const double>)> log_cumulant;
    std::function<Vector(std::span<const double>)> eta_of_theta;
    SupportRegion theta_support;
    std::size_t q = 1;

    void validate() const;
};

/// Hyperparameters (tau, n0) of pi(theta | tau, n0) = K exp{tau' eta - n0 A(eta)}.
/// n0 is real-valued.
struct ConjugateHyper {
    Vector tau;
    double n0 = 0.0;
};

/// Sum of sufficient statistics and sample size.
struct SufficientData {
    Vector sum_t;
    double n = 0.0;
};

SufficientData summarise(const ExpFamSpec& spec, std::span<const double> ys);

enum class Pair { prior_lik, prior_post, post_lik };

/// ln K(tau, n0) = -ln int exp{tau' eta - n0 A(eta)} dtheta. Throws
/// ImproperMember when the integral diverges; the exception's term() is
/// `term_name`.
double log_K(const ExpFamSpec& spec, const ConjugateHyper& h, const QuadSpec& quad = {},
             const std::string& term_name = "K(tau, n0)");

/// Compatibility from ratios of normalizing constants, e.g. for prior_lik
/// {K(2tau, 2n0) K(2S, 2n)}^{1/2} / K(tau + S, n0 + n) with S = sum T(y_i).
double ef_kappa(const ExpFamSpec& spec, const ConjugateHyper& h, const SufficientData& data, Pair which,
                const QuadSpec& quad = {});

/// Affine (square-root) compatibility from normalizing constants at halved
/// arguments, e.g. for prior_lik {K(tau, n0) K(S, n)}^{1/2} / K((tau+S)/2, (n0+n)/2).
double ef_affine_kappa(const ExpFamSpec& spec, const ConjugateHyper& h, const SufficientData& data,
                       Pair which, const QuadSpec& quad = {});

/// The data-dependent member (S, n), collinear to the likelihood. Throws
/// ImproperMember when K(S, n) does not exist (e.g. no data on an unbounded
/// parameter space).
ConjugateHyper ef_max_compatible(const ExpFamSpec& spec, const SufficientData& data,
                                 const QuadSpec& quad = {});

/// Posterior hyperparameters (tau + S, n0 + n).
ConjugateHyper ef_posterior(const ConjugateHyper& h, const SufficientData& data);

/// Unnormalised conjugate member exp{tau' eta - n0 A(eta)} as a field.
ScalarField ef_member_field(const ExpFamSpec& spec, const ConjugateHyper& h,
                            FieldKind kind = FieldKind::prior);
/// prod h(y_i) exp{eta' S - n A(eta)}.
ScalarField ef_likelihood_field(const ExpFamSpec& spec, std::span<const double> ys);

// Built-in families -----------------------------------------------------------

/// Bernoulli in the log-odds parameter eta in R; T(y) = y, A = log(1 + e^eta).
/// Beta(a, b)-style hyperparameters correspond to (tau, n0) = (a, a + b).
ExpFamSpec bernoulli_canonical();
/// Bernoulli in the success probability theta in (0,1). Beta(a, b) is the
/// member (tau, n0) = (a - 1, a + b - 2).
ExpFamSpec bernoulli_mean();
/// N(theta, variance) with known variance, theta in R: eta = theta/variance,
/// T(y) = y, A(eta) = variance eta^2 / 2.
ExpFamSpec normal_known_variance(double variance = 1.0);

/// Looks up "bernoulli-canonical", "bernoulli-mean" or "normal-known-variance".
ExpFamSpec builtin(const std::string& name, double variance = 1.0);

std::string to_string(Pair which);
Pair pair_from_string(const std::string& name);

}  // namespace bayesgeom::expfam
