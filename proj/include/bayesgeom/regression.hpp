#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayesgeom/estimators.hpp"
#include "bayesgeom/report.hpp"

namespace bayesgeom::regression {

struct RegressionData {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    bool standardized = false;
    std::vector<std::string> names;  // covariate names, may be empty

    std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(X.cols()); }
};

/// Centres y and scales each column of X to mean 0, sample SD 1.
/// Throws ValidationError for n <= p, p < 1 or a constant column.
RegressionData prepare(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::vector<std::string> names = {});

/// Reads a comma- or whitespace-delimited table with a header row. A header
/// one field shorter than the data rows means the first field is a row label
/// and is dropped; a column called "train" is dropped. Returns prepared data.
RegressionData load_table(const std::string& path, const std::string& response = "lpsa");

/// Seeded stand-in with correlated Gaussian covariates and a sparse-ish
/// coefficient vector; already prepared.
RegressionData synthetic_fixture(std::uint64_t seed = 0, std::size_t n = 97, std::size_t p = 8);

enum class PriorKind { gaussian, laplace };

std::string to_string(PriorKind k);
PriorKind prior_kind_from_string(const std::string& s);

struct ShrinkageConfig {
    PriorKind prior_kind = PriorKind::gaussian;
    double lambda_sq = 1.0;
    std::vector<double> prior_center;  // empty means 0
    double sigma_lower = 0.0;
    double sigma_upper = 2.0;

    /// Laplace scale with variance lambda_sq: b = sqrt(lambda_sq / 2).
    double laplace_scale() const;
    void validate(std::size_t p) const;
};

/// log pi(beta), product of independent marginals.
double log_prior_beta(const ShrinkageConfig& cfg, std::span<const double> beta);
/// log of the Uniform(sigma_lower, sigma_upper) density, -inf outside.
double log_prior_sigma(const ShrinkageConfig& cfg, double sigma);
/// Full Gaussian log-likelihood log N(y; X beta, sigma^2 I).
double log_likelihood(const RegressionData& data, std::span<const double> beta, double sigma);
double log_posterior(const RegressionData& data, const ShrinkageConfig& cfg, std::span<const double> beta,
                     double sigma);

/// Closed-form L2 norm of the beta-block prior: Gaussian (4 pi lambda^2)^{-p/4},
/// Laplace (4b)^{-p/2}.
double prior_norm_shrinkage(const ShrinkageConfig& cfg, std::size_t p);

/// Draws of theta = (beta, sigma) from the joint prior.
Draws sample_prior(const ShrinkageConfig& cfg, std::size_t p, std::size_t count, std::uint64_t seed);

struct CurveConfig {
    std::vector<double> lambda_sq;
    std::vector<PriorKind> kinds = {PriorKind::gaussian, PriorKind::laplace};
    std::size_t draws = 20000;
    std::size_t burn_in = 0;  // 0 means draws / 10
    std::size_t thin = 1;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

/// One row per (lambda_sq, kind, metric): prior_norm (closed form),
/// kappa_pi_lik_local, kappa_pi_p, kappa_lik_p_local. Columns
/// lambda_sq, prior_kind, metric, estimate, mc_se, ess, acceptance, status.
Table kappa_curves(const RegressionData& data, const CurveConfig& cfg);

struct PriorPriorConfig {
    std::vector<double> lambda_sq;
    std::vector<double> centers = {0.0, 0.5, 2.0};
    std::size_t p = 8;
    std::size_t draws = 100000;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

/// kappa between a Gaussian prior centred at c*1 and a zero-centred Laplace
/// prior of the same variance. Standardised draws are shared across the
/// lambda grid for a given centre. Columns lambda_sq, center, estimate,
/// mc_se, ess.
Table prior_prior_curve(const PriorPriorConfig& cfg);

}  // namespace bayesgeom::regression
