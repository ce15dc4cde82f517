#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bayesgeom/conjugate.hpp"
#include "bayesgeom/sampling.hpp"

namespace bayesgeom {

enum class SamplingMethod { direct, rw_metropolis };

/// Posterior and prior draws together with the log-densities the estimators
/// evaluate at them. The optional second prior feeds kappa_pi1_pi2.
struct SampleBatch {
    Draws posterior_draws;
    Draws prior_draws;
    LogDensity log_prior;
    LogDensity log_lik;
    Draws prior2_draws;
    LogDensity log_prior2;
    std::uint64_t seed = 0;
    SamplingMethod method = SamplingMethod::direct;
};

struct TracePoint {
    std::size_t b;
    double value;
};

struct RunningTrace {
    std::string estimator_name;
    std::vector<TracePoint> estimates;
    /// Draws dropped because a ratio was infinite (likelihood zero).
    std::size_t excluded_draws = 0;
    bool flagged = false;
    std::string flag;
};

/// Running kappa_{pi,p} from posterior draws only:
///   mean(pi) / sqrt(mean(pi/ell) * mean(ell*pi)).
/// The pi/ell term is a harmonic-mean estimator and can have infinite
/// variance. Draws where ell = 0 are counted, excluded and flag the trace.
RunningTrace kappa_pp_harmonic(const SampleBatch& batch, std::size_t stride = 1);

/// Running kappa_{pi,p} replacing E_p{pi/ell} by E_pi{pi}/E_pi{ell}, with
/// the E_pi terms taken over prior draws. Uses the first b draws of each
/// stream at step b.
RunningTrace kappa_pp_stable(const SampleBatch& batch, std::size_t stride = 1);

enum class Target {
    norm_p,
    norm_pi,
    norm_lik_local,
    kappa_pi_lik_local,
    kappa_pi_p,
    kappa_pi1_pi2,
    kappa_lik_p_local,
};

std::string to_string(Target t);
Target target_from_string(const std::string& name);
const std::vector<Target>& all_targets();

struct Estimate {
    double value = std::numeric_limits<double>::quiet_NaN();
    /// Delta-method standard error from non-overlapping batch means.
    double mc_se = std::numeric_limits<double>::quiet_NaN();
    /// Smallest effective sample size among the expectations involved; each
    /// is the lesser of the batch-means and the Kish (weight) estimate.
    double ess = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string error;
    std::vector<std::string> warnings;

    bool operator==(const Estimate&) const = default;
};

struct CompatReport {
    std::string model;
    std::string method;
    std::size_t posterior_draws = 0;
    std::size_t prior_draws = 0;
    std::uint64_t seed = 0;
    /// Closed-form or quadrature quantities, by name.
    std::map<std::string, double> values;
    /// Monte Carlo estimates, by target name.
    std::map<std::string, Estimate> estimates;
    std::vector<std::string> notes;

    bool operator==(const CompatReport&) const = default;
};

struct SuiteOptions {
    std::size_t batches = 40;
    double ess_warning = 100.0;
};

/// Prior/posterior mean-based estimates of the selected targets. Each target
/// is a product of powers of expectations, e.g.
///   norm_p            = {E_p[ell pi] / E_pi[ell]}^{1/2}
///   kappa_lik_p_local = E_p[ell] {E_p[ell/pi] E_p[ell pi]}^{-1/2}
/// All expectations are accumulated in the log domain. A target that cannot
/// be formed (missing draws, pi = 0 at a posterior draw for the ratio forms)
/// is reported with ok = false without affecting the others.
CompatReport postmean_suite(const SampleBatch& batch, const std::set<Target>& targets,
                            const SuiteOptions& options = {});

/// E_{pi1}[pi2] {E_{pi1}[pi1] E_{pi2}[pi2]}^{-1/2}.
double kappa_pi1_pi2_mc(const Draws& draws_pi1, const Draws& draws_pi2, const LogDensity& log_pi1,
                        const LogDensity& log_pi2);

/// Beta-Bernoulli batch: direct Beta posterior draws (or a random-walk chain
/// on (0,1)) and an independent stream of direct prior draws, each seeded by
/// derive_seed(seed, stream).
SampleBatch beta_bernoulli_batch(const conjugate::BetaBernoulliModel& m, std::size_t draws,
                                 std::uint64_t seed, SamplingMethod method = SamplingMethod::direct);

}  // namespace bayesgeom
