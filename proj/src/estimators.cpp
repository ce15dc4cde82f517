#include "bayesgeom/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bayesgeom/errors.hpp"
#include "bayesgeom/numerics.hpp"

namespace bayesgeom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Streaming log-mean with a running max shift.
class LogMean {
 public:
    void add(double v) {
        ++count_;
        if (v == -kInf) return;
        if (v > shift_) {
            sum_ = sum_ * std::exp(shift_ - v) + 1.0;
            shift_ = v;
        } else {
            sum_ += std::exp(v - shift_);
        }
    }
    double log_mean() const {
        if (count_ == 0) return kNaN;
        if (sum_ == 0.0) return -kInf;
        return shift_ + std::log(sum_) - std::log(static_cast<double>(count_));
    }

 private:
    double shift_ = -kInf;
    double sum_ = 0.0;
    std::size_t count_ = 0;
};

std::vector<double> evaluate(const Draws& draws, const LogDensity& f) {
    std::vector<double> out(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) out[i] = f(draws.row(i));
    return out;
}

enum Term : std::size_t {
    P_pi,           // E_p[pi]
    P_lik_pi,       // E_p[ell pi]
    P_lik_over_pi,  // E_p[ell / pi]
    P_lik,          // E_p[ell]
    R_pi,           // E_pi[pi]
    R_lik,          // E_pi[ell]
    R_pi2,          // E_pi1[pi2]
    Q_pi2,          // E_pi2[pi2]
    kTerms
};

enum Stream { posterior, prior, prior2 };

constexpr std::array<Stream, kTerms> kStreamOf = {posterior, posterior, posterior, posterior,
                                                  prior,     prior,     prior,     prior2};

constexpr std::array<const char*, kTerms> kTermName = {"E_p[pi]",  "E_p[ell*pi]", "E_p[ell/pi]", "E_p[ell]",
                                                       "E_pi[pi]", "E_pi[ell]",   "E_pi1[pi2]",  "E_pi2[pi2]"};

struct Power {
    Term term;
    double exponent;
};

std::vector<Power> recipe(Target t) {
    switch (t) {
        case Target::norm_p: return {{P_lik_pi, 0.5}, {R_lik, -0.5}};
        case Target::norm_pi: return {{R_pi, 0.5}};
        case Target::norm_lik_local: return {{R_lik, 0.5}, {P_lik_over_pi, 0.5}};
        case Target::kappa_pi_lik_local: return {{R_lik, 0.5}, {R_pi, -0.5}, {P_lik_over_pi, -0.5}};
        case Target::kappa_pi_p: return {{P_pi, 1.0}, {R_pi, -0.5}, {R_lik, 0.5}, {P_lik_pi, -0.5}};
        case Target::kappa_pi1_pi2: return {{R_pi2, 1.0}, {R_pi, -0.5}, {Q_pi2, -0.5}};
        case Target::kappa_lik_p_local: return {{P_lik, 1.0}, {P_lik_over_pi, -0.5}, {P_lik_pi, -0.5}};
    }
    throw std::invalid_argument("unknown target");
}

struct TermStats {
    bool available = false;
    std::string error;
    double log_mean = kNaN;
    double shift = 0.0;
    std::vector<double> batch;  // batch means of exp(v - shift)
    double batch_mean = 0.0;
    double ess = kNaN;
};

TermStats term_stats(const std::vector<double>& logs, std::size_t batches) {
    TermStats s;
    if (logs.empty()) {
        s.error = "no draws";
        return s;
    }
    for (double v : logs) {
        if (std::isnan(v) || v == kInf) {
            s.error = "non-finite integrand value";
            return s;
        }
    }
    s.available = true;
    const std::size_t n = logs.size();
    s.shift = *std::max_element(logs.begin(), logs.end());
    if (s.shift == -kInf) {
        s.log_mean = -kInf;
        return s;
    }
    double sum = 0.0, sum_sq = 0.0;
    for (double v : logs) {
        const double y = std::exp(v - s.shift);
        sum += y;
        sum_sq += y * y;
    }
    s.log_mean = s.shift + std::log(sum / static_cast<double>(n));

    const std::size_t nb = std::min(batches, n);
    const std::size_t size = n / nb;
    s.batch.assign(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
        double acc = 0.0;
        for (std::size_t i = b * size; i < (b + 1) * size; ++i) acc += std::exp(logs[i] - s.shift);
        s.batch[b] = acc / static_cast<double>(size);
    }
    for (double y : s.batch) s.batch_mean += y;
    s.batch_mean /= static_cast<double>(nb);

    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
    double var_of_mean = 0.0;
    if (nb > 1) {
        for (double y : s.batch) var_of_mean += (y - s.batch_mean) * (y - s.batch_mean);
        var_of_mean /= static_cast<double>(nb) * static_cast<double>(nb - 1);
    }
    s.ess = var_of_mean > 0.0 ? std::min(static_cast<double>(n), var / var_of_mean) : static_cast<double>(n);
    // Kish effective size of the weights exp(v): catches averages carried by
    // a handful of draws, which batch means cannot see.
    s.ess = std::min(s.ess, sum * sum / sum_sq);
    return s;
}

double batch_cov(const TermStats& a, const TermStats& b) {
    const std::size_t nb = a.batch.size();
    if (nb < 2 || b.batch.size() != nb) return 0.0;
    double c = 0.0;
    for (std::size_t k = 0; k < nb; ++k) c += (a.batch[k] - a.batch_mean) * (b.batch[k] - b.batch_mean);
    return c / (static_cast<double>(nb) * static_cast<double>(nb - 1));
}

Estimate combine(const std::vector<Power>& powers, const std::array<TermStats, kTerms>& stats,
                 double ess_warning) {
    Estimate e;
    double log_value = 0.0;
    for (const auto& p : powers) {
        const TermStats& s = stats[p.term];
        if (!s.available) {
            e.error = std::string(kTermName[p.term]) + ": " + s.error;
            return e;
        }
        if (s.log_mean == -kInf) {
            if (p.exponent < 0) {
                e.error = std::string(kTermName[p.term]) + " is zero";
                return e;
            }
            e.value = 0.0;
            e.mc_se = 0.0;
            e.ess = kNaN;
            e.ok = true;
            return e;
        }
        log_value += p.exponent * s.log_mean;
    }
    // Delta method on log of the product; terms on different streams are
    // independent.
    double var_log = 0.0;
    double ess = kInf;
    for (const auto& p : powers) {
        const TermStats& sp = stats[p.term];
        ess = std::min(ess, sp.ess);
        for (const auto& q : powers) {
            if (kStreamOf[p.term] != kStreamOf[q.term]) continue;
            const TermStats& sq = stats[q.term];
            var_log += p.exponent * q.exponent * batch_cov(sp, sq) / (sp.batch_mean * sq.batch_mean);
        }
    }
    e.value = std::exp(log_value);
    e.mc_se = e.value * std::sqrt(std::max(0.0, var_log));
    e.ess = ess;
    e.ok = std::isfinite(e.value);
    if (!e.ok) e.error = "estimate overflowed";
    if (e.ok && ess < ess_warning) {
        e.warnings.push_back("effective sample size " + std::to_string(static_cast<long long>(ess)) +
                             " below " + std::to_string(static_cast<long long>(ess_warning)));
    }
    return e;
}

}  // namespace

std::string to_string(Target t) {
    switch (t) {
        case Target::norm_p: return "norm_p";
        case Target::norm_pi: return "norm_pi";
        case Target::norm_lik_local: return "norm_lik_local";
        case Target::kappa_pi_lik_local: return "kappa_pi_lik_local";
        case Target::kappa_pi_p: return "kappa_pi_p";
        case Target::kappa_pi1_pi2: return "kappa_pi1_pi2";
        case Target::kappa_lik_p_local: return "kappa_lik_p_local";
    }
    return "?";
}

Target target_from_string(const std::string& name) {
    for (Target t : all_targets()) {
        if (to_string(t) == name) return t;
    }
    throw ValidationError("unknown estimator target '" + name + "'");
}

const std::vector<Target>& all_targets() {
    static const std::vector<Target> all = {Target::norm_p,        Target::norm_pi,
                                            Target::norm_lik_local, Target::kappa_pi_lik_local,
                                            Target::kappa_pi_p,     Target::kappa_pi1_pi2,
                                            Target::kappa_lik_p_local};
    return all;
}

RunningTrace kappa_pp_harmonic(const SampleBatch& batch, std::size_t stride) {
    if (batch.posterior_draws.empty()) throw std::invalid_argument("kappa_pp_harmonic: no posterior draws");
    if (stride < 1) stride = 1;
    RunningTrace trace;
    trace.estimator_name = "harmonic";
    LogMean m_pi, m_pi_over_lik, m_lik_pi;
    const std::size_t n = batch.posterior_draws.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto theta = batch.posterior_draws.row(i);
        const double lp = batch.log_prior(theta);
        const double ll = batch.log_lik(theta);
        if (ll == -kInf || std::isnan(ll)) {
            ++trace.excluded_draws;
        } else {
            m_pi.add(lp);
            m_pi_over_lik.add(lp - ll);
            m_lik_pi.add(lp + ll);
        }
        const std::size_t b = i + 1;
        if (b % stride == 0 || b == n) {
            const double v = std::exp(m_pi.log_mean() - 0.5 * (m_pi_over_lik.log_mean() + m_lik_pi.log_mean()));
            trace.estimates.push_back({b, v});
        }
    }
    if (trace.excluded_draws > 0) {
        trace.flagged = true;
        trace.flag = "unstable: " + std::to_string(trace.excluded_draws) +
                     " draws with zero likelihood excluded from the pi/ell average";
    }
    return trace;
}

RunningTrace kappa_pp_stable(const SampleBatch& batch, std::size_t stride) {
    if (batch.posterior_draws.empty()) throw std::invalid_argument("kappa_pp_stable: no posterior draws");
    if (batch.prior_draws.empty()) throw std::invalid_argument("kappa_pp_stable: no prior draws");
    if (stride < 1) stride = 1;
    RunningTrace trace;
    trace.estimator_name = "stable";
    LogMean p_pi, p_lik_pi, r_pi, r_lik;
    const std::size_t n = std::min(batch.posterior_draws.size(), batch.prior_draws.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto post = batch.posterior_draws.row(i);
        const double lp = batch.log_prior(post);
        const double ll = batch.log_lik(post);
        p_pi.add(lp);
        p_lik_pi.add(lp + ll);
        const auto pr = batch.prior_draws.row(i);
        r_pi.add(batch.log_prior(pr));
        r_lik.add(batch.log_lik(pr));
        const std::size_t b = i + 1;
        if (b % stride == 0 || b == n) {
            const double v =
                std::exp(p_pi.log_mean() - 0.5 * (r_pi.log_mean() - r_lik.log_mean() + p_lik_pi.log_mean()));
            trace.estimates.push_back({b, v});
        }
    }
    return trace;
}

CompatReport postmean_suite(const SampleBatch& batch, const std::set<Target>& targets,
                            const SuiteOptions& options) {
    if (options.batches < 2) throw std::invalid_argument("postmean_suite: need at least 2 batches");
    CompatReport report;
    report.method = batch.method == SamplingMethod::direct ? "direct" : "rw_metropolis";
    report.posterior_draws = batch.posterior_draws.size();
    report.prior_draws = batch.prior_draws.size();
    report.seed = batch.seed;

    std::array<bool, kTerms> needed{};
    for (Target t : targets) {
        for (const auto& p : recipe(t)) needed[p.term] = true;
    }

    std::array<TermStats, kTerms> stats;
    const auto missing = [&](Term t, const std::string& why) { stats[t].error = why; };

    const bool need_post = needed[P_pi] || needed[P_lik_pi] || needed[P_lik_over_pi] || needed[P_lik];
    if (need_post) {
        if (batch.posterior_draws.empty() || !batch.log_prior || !batch.log_lik) {
            for (Term t : {P_pi, P_lik_pi, P_lik_over_pi, P_lik}) missing(t, "posterior draws not available");
        } else {
            const auto lp = evaluate(batch.posterior_draws, batch.log_prior);
            const auto ll = evaluate(batch.posterior_draws, batch.log_lik);
            const std::size_t n = lp.size();
            std::vector<double> v(n);
            if (needed[P_pi]) stats[P_pi] = term_stats(lp, options.batches);
            if (needed[P_lik]) stats[P_lik] = term_stats(ll, options.batches);
            if (needed[P_lik_pi]) {
                for (std::size_t i = 0; i < n; ++i) v[i] = lp[i] + ll[i];
                stats[P_lik_pi] = term_stats(v, options.batches);
            }
            if (needed[P_lik_over_pi]) {
                const bool pi_positive = std::all_of(lp.begin(), lp.end(), [](double x) { return x > -kInf; });
                if (!pi_positive) {
                    missing(P_lik_over_pi, "prior density is zero at a posterior draw");
                } else {
                    for (std::size_t i = 0; i < n; ++i) v[i] = ll[i] - lp[i];
                    stats[P_lik_over_pi] = term_stats(v, options.batches);
                }
            }
        }
    }

    const bool need_prior = needed[R_pi] || needed[R_lik] || needed[R_pi2];
    if (need_prior) {
        if (batch.prior_draws.empty() || !batch.log_prior) {
            for (Term t : {R_pi, R_lik, R_pi2}) missing(t, "prior draws not available");
        } else {
            if (needed[R_pi]) stats[R_pi] = term_stats(evaluate(batch.prior_draws, batch.log_prior), options.batches);
            if (needed[R_lik]) {
                if (batch.log_lik) {
                    stats[R_lik] = term_stats(evaluate(batch.prior_draws, batch.log_lik), options.batches);
                } else {
                    missing(R_lik, "no likelihood supplied");
                }
            }
            if (needed[R_pi2]) {
                if (batch.log_prior2) {
                    stats[R_pi2] = term_stats(evaluate(batch.prior_draws, batch.log_prior2), options.batches);
                } else {
                    missing(R_pi2, "second prior not supplied");
                }
            }
        }
    }

    if (needed[Q_pi2]) {
        if (batch.prior2_draws.empty() || !batch.log_prior2) {
            missing(Q_pi2, "second-prior draws not available");
        } else {
            stats[Q_pi2] = term_stats(evaluate(batch.prior2_draws, batch.log_prior2), options.batches);
        }
    }

    for (Target t : targets) {
        report.estimates[to_string(t)] = combine(recipe(t), stats, options.ess_warning);
    }
    return report;
}

double kappa_pi1_pi2_mc(const Draws& draws_pi1, const Draws& draws_pi2, const LogDensity& log_pi1,
                        const LogDensity& log_pi2) {
    if (draws_pi1.empty() || draws_pi2.empty()) throw std::invalid_argument("kappa_pi1_pi2_mc: empty draws");
    LogMean cross, self1, self2;
    for (std::size_t i = 0; i < draws_pi1.size(); ++i) {
        const auto theta = draws_pi1.row(i);
        cross.add(log_pi2(theta));
        self1.add(log_pi1(theta));
    }
    for (std::size_t i = 0; i < draws_pi2.size(); ++i) self2.add(log_pi2(draws_pi2.row(i)));
    return std::exp(cross.log_mean() - 0.5 * (self1.log_mean() + self2.log_mean()));
}

SampleBatch beta_bernoulli_batch(const conjugate::BetaBernoulliModel& m, std::size_t draws, std::uint64_t seed,
                                 SamplingMethod method) {
    m.validate();
    if (draws < 1) throw std::invalid_argument("beta_bernoulli_batch: draws must be >= 1");
    const double a = m.a, b = m.b;
    const double log_norm = log_beta(a, b);
    const unsigned n = m.n, n1 = m.n1;
    const double log_coef = log_binomial(n, n1);

    SampleBatch batch;
    batch.seed = seed;
    batch.method = method;
    batch.log_prior = [a, b, log_norm](std::span<const double> th) {
        const double t = th[0];
        if (!(t > 0.0 && t < 1.0)) return -kInf;
        return (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - log_norm;
    };
    batch.log_lik = [n, n1, log_coef](std::span<const double> th) {
        const double t = th[0];
        if (!(t > 0.0 && t < 1.0)) return -kInf;
        double v = log_coef;
        if (n1 > 0) v += n1 * std::log(t);
        if (n > n1) v += (n - n1) * std::log1p(-t);
        return v;
    };

    const double ap = m.a_post(), bp = m.b_post();
    if (method == SamplingMethod::direct) {
        batch.posterior_draws = sample_direct_beta(ap, bp, draws, derive_seed(seed, 0));
    } else {
        const auto lp = batch.log_prior;
        const auto ll = batch.log_lik;
        MetropolisConfig cfg;
        cfg.steps = draws;
        cfg.seed = derive_seed(seed, 0);
        cfg.adapt = true;
        const double mean = ap / (ap + bp);
        cfg.step_scale = {2.4 * std::sqrt(mean * (1.0 - mean) / (ap + bp + 1.0))};
        batch.posterior_draws =
            rw_metropolis([lp, ll](std::span<const double> th) { return lp(th) + ll(th); }, {mean}, cfg).draws;
    }
    batch.prior_draws = sample_direct_beta(a, b, draws, derive_seed(seed, 1));
    return batch;
}

}  // namespace bayesgeom
