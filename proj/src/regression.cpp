#include "bayesgeom/regression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bayesgeom/errors.hpp"
#include "bayesgeom/parallel.hpp"

namespace bayesgeom::regression {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    if (line.find(',') != std::string::npos) {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r\"");
            const auto e = cell.find_last_not_of(" \t\r\"");
            out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
    } else {
        std::stringstream ss(line);
        std::string cell;
        while (ss >> cell) out.push_back(cell);
    }
    return out;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double center_of(const ShrinkageConfig& cfg, std::size_t j) {
    return cfg.prior_center.empty() ? 0.0 : cfg.prior_center[j];
}

// Sufficient quantities so each likelihood evaluation is O(p^2).
struct Gram {
    Eigen::MatrixXd xtx;
    Eigen::VectorXd xty;
    double yty;
    double n;
};

Gram gram(const RegressionData& d) {
    return {d.X.transpose() * d.X, d.X.transpose() * d.y, d.y.squaredNorm(), static_cast<double>(d.n())};
}

double log_lik_gram(const Gram& g, std::span<const double> beta, double sigma) {
    if (!(sigma > 0.0)) return -kInf;
    const Eigen::Map<const Eigen::VectorXd> b(beta.data(), static_cast<Eigen::Index>(beta.size()));
    const double rss = std::max(0.0, g.yty - 2.0 * b.dot(g.xty) + b.dot(g.xtx * b));
    return -0.5 * g.n * std::log(2.0 * std::numbers::pi * sigma * sigma) - 0.5 * rss / (sigma * sigma);
}

}  // namespace

RegressionData prepare(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::vector<std::string> names) {
    const auto n = X.rows();
    const auto p = X.cols();
    if (p < 1) throw ValidationError("prepare: need at least one covariate");
    if (y.size() != n) throw ValidationError("prepare: y and X have different numbers of rows");
    if (n <= p) throw ValidationError("prepare: need more observations than covariates (n > p)");
    if (!names.empty() && names.size() != static_cast<std::size_t>(p)) {
        throw ValidationError("prepare: one name per covariate");
    }
    RegressionData d;
    d.y = y.array() - y.mean();
    d.X = X;
    for (Eigen::Index j = 0; j < p; ++j) {
        auto col = d.X.col(j);
        col.array() -= col.mean();
        const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n - 1));
        if (!(sd > 1e-12 * (1.0 + X.col(j).cwiseAbs().maxCoeff()))) {
            const std::string label = names.empty() ? "column " + std::to_string(j) : names[j];
            throw ValidationError("prepare: covariate " + label + " is constant");
        }
        col /= sd;
    }
    d.standardized = true;
    d.names = std::move(names);
    return d;
}

RegressionData load_table(const std::string& path, const std::string& response) {
    std::ifstream in(path);
    if (!in) throw ValidationError("load_table: cannot open " + path);
    std::string line;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) header = split_fields(line);
    if (header.empty()) throw ValidationError("load_table: no header in " + path);

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        auto f = split_fields(line);
        if (f.empty()) continue;
        if (f.size() == header.size() + 1) f.erase(f.begin());
        if (f.size() != header.size()) {
            throw ValidationError("load_table: row " + std::to_string(rows.size() + 1) + " has " +
                                  std::to_string(f.size()) + " fields, header has " + std::to_string(header.size()));
        }
        rows.push_back(std::move(f));
    }
    if (rows.empty()) throw ValidationError("load_table: no data rows in " + path);

    std::vector<std::size_t> keep;
    std::size_t resp = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        const std::string h = lower(header[j]);
        if (h == lower(response)) {
            resp = j;
        } else if (h != "train" && !h.empty()) {
            keep.push_back(j);
        }
    }
    if (resp == header.size()) throw ValidationError("load_table: response column '" + response + "' not found");

    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::VectorXd y(n);
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(keep.size()));
    const auto parse = [&](const std::string& s, std::size_t row, std::size_t col) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0') {
            throw ValidationError("load_table: non-numeric value '" + s + "' in column " + header[col] + ", row " +
                                  std::to_string(row + 1));
        }
        return v;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = parse(rows[i][resp], i, resp);
        for (std::size_t k = 0; k < keep.size(); ++k) {
            X(i, static_cast<Eigen::Index>(k)) = parse(rows[i][keep[k]], i, keep[k]);
        }
    }
    std::vector<std::string> names;
    for (std::size_t k : keep) names.push_back(header[k]);
    return prepare(y, X, std::move(names));
}

RegressionData synthetic_fixture(std::uint64_t seed, std::size_t n, std::size_t p) {
    Rng rng(seed);
    const auto N = static_cast<Eigen::Index>(n);
    const auto P = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd X(N, P);
    // AR(1)-style correlation between neighbouring covariates.
    for (Eigen::Index i = 0; i < N; ++i) {
        double prev = rng.normal();
        X(i, 0) = prev;
        for (Eigen::Index j = 1; j < P; ++j) {
            prev = 0.5 * prev + std::sqrt(0.75) * rng.normal();
            X(i, j) = prev;
        }
    }
    const double pattern[] = {0.6, 0.3, -0.15, 0.1, 0.3, -0.1, 0.0, 0.1};
    Eigen::VectorXd beta(P);
    for (Eigen::Index j = 0; j < P; ++j) beta(j) = pattern[j % 8];
    Eigen::VectorXd y = X * beta;
    for (Eigen::Index i = 0; i < N; ++i) y(i) += 0.7 * rng.normal();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    return prepare(y, X, std::move(names));
}

std::string to_string(PriorKind k) { return k == PriorKind::gaussian ? "gaussian" : "laplace"; }

PriorKind prior_kind_from_string(const std::string& s) {
    if (s == "gaussian") return PriorKind::gaussian;
    if (s == "laplace") return PriorKind::laplace;
    throw ValidationError("unknown prior kind '" + s + "' (expected gaussian or laplace)");
}

double ShrinkageConfig::laplace_scale() const { return std::sqrt(0.5 * lambda_sq); }

void ShrinkageConfig::validate(std::size_t p) const {
    if (!(lambda_sq > 0.0) || !std::isfinite(lambda_sq)) throw ValidationError("lambda_sq must be positive");
    if (!prior_center.empty() && prior_center.size() != p) {
        throw ValidationError("prior_center must have one entry per coefficient");
    }
    if (!(sigma_lower >= 0.0 && sigma_upper > sigma_lower)) throw ValidationError("invalid sigma prior interval");
}

double log_prior_beta(const ShrinkageConfig& cfg, std::span<const double> beta) {
    double out = 0.0;
    if (cfg.prior_kind == PriorKind::gaussian) {
        const double c = -0.5 * std::log(2.0 * std::numbers::pi * cfg.lambda_sq);
        for (std::size_t j = 0; j < beta.size(); ++j) {
            const double z = beta[j] - center_of(cfg, j);
            out += c - 0.5 * z * z / cfg.lambda_sq;
        }
    } else {
        const double b = cfg.laplace_scale();
        const double c = -std::log(2.0 * b);
        for (std::size_t j = 0; j < beta.size(); ++j) out += c - std::abs(beta[j] - center_of(cfg, j)) / b;
    }
    return out;
}

double log_prior_sigma(const ShrinkageConfig& cfg, double sigma) {
    if (!(sigma > cfg.sigma_lower && sigma < cfg.sigma_upper)) return -kInf;
    return -std::log(cfg.sigma_upper - cfg.sigma_lower);
}

double log_likelihood(const RegressionData& data, std::span<const double> beta, double sigma) {
    if (beta.size() != data.p()) throw std::invalid_argument("log_likelihood: beta has wrong dimension");
    if (!(sigma > 0.0)) return -kInf;
    const Eigen::Map<const Eigen::VectorXd> b(beta.data(), static_cast<Eigen::Index>(beta.size()));
    const double rss = (data.y - data.X * b).squaredNorm();
    return -0.5 * static_cast<double>(data.n()) * std::log(2.0 * std::numbers::pi * sigma * sigma) -
           0.5 * rss / (sigma * sigma);
}

double log_posterior(const RegressionData& data, const ShrinkageConfig& cfg, std::span<const double> beta,
                     double sigma) {
    const double ls = log_prior_sigma(cfg, sigma);
    if (ls == -kInf) return -kInf;
    return log_likelihood(data, beta, sigma) + log_prior_beta(cfg, beta) + ls;
}

double prior_norm_shrinkage(const ShrinkageConfig& cfg, std::size_t p) {
    cfg.validate(p);
    const double pd = static_cast<double>(p);
    if (cfg.prior_kind == PriorKind::gaussian) return std::pow(4.0 * std::numbers::pi * cfg.lambda_sq, -pd / 4.0);
    return std::pow(4.0 * cfg.laplace_scale(), -pd / 2.0);
}

Draws sample_prior(const ShrinkageConfig& cfg, std::size_t p, std::size_t count, std::uint64_t seed) {
    cfg.validate(p);
    Rng rng(seed);
    Draws out(p + 1);
    out.reserve(count);
    std::vector<double> theta(p + 1);
    const double sd = std::sqrt(cfg.lambda_sq);
    const double b = cfg.laplace_scale();
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            theta[j] = center_of(cfg, j) + (cfg.prior_kind == PriorKind::gaussian ? sd * rng.normal() : rng.laplace(b));
        }
        theta[p] = cfg.sigma_lower + (cfg.sigma_upper - cfg.sigma_lower) * rng.uniform();
        out.push_back(theta);
    }
    return out;
}

Table kappa_curves(const RegressionData& data, const CurveConfig& cfg) {
    if (cfg.lambda_sq.empty()) throw ValidationError("kappa_curves: lambda_sq grid is empty");
    if (cfg.kinds.empty()) throw ValidationError("kappa_curves: no prior kinds selected");
    const std::size_t p = data.p();
    const Gram g = gram(data);

    // Starting point and proposal scales from least squares.
    const Eigen::VectorXd ols = g.xtx.ldlt().solve(g.xty);
    const double rss = (data.y - data.X * ols).squaredNorm();
    const double sigma_hat = std::sqrt(rss / static_cast<double>(data.n() - p));
    const Eigen::VectorXd ols_sd = (g.xtx.inverse().diagonal().array() * sigma_hat * sigma_hat).sqrt();

    const std::vector<Target> metrics = {Target::kappa_pi_lik_local, Target::kappa_pi_p, Target::kappa_lik_p_local};
    const std::size_t cells = cfg.lambda_sq.size() * cfg.kinds.size();
    std::vector<std::vector<std::vector<Table::Cell>>> cell_rows(cells);

    parallel_for(cells, cfg.threads, [&](std::size_t c) {
        const double lam = cfg.lambda_sq[c / cfg.kinds.size()];
        const PriorKind kind = cfg.kinds[c % cfg.kinds.size()];
        ShrinkageConfig sc;
        sc.prior_kind = kind;
        sc.lambda_sq = lam;
        auto& rows = cell_rows[c];
        rows.push_back({lam, to_string(kind), "prior_norm", prior_norm_shrinkage(sc, p), 0.0,
                        std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), "ok"});

        const std::uint64_t cell_seed = derive_seed(cfg.seed, c);
        SampleBatch batch;
        batch.seed = cell_seed;
        batch.method = SamplingMethod::rw_metropolis;
        batch.log_prior = [sc, p](std::span<const double> th) {
            const double ls = log_prior_sigma(sc, th[p]);
            return ls == -kInf ? -kInf : ls + log_prior_beta(sc, th.first(p));
        };
        batch.log_lik = [&g, p](std::span<const double> th) { return log_lik_gram(g, th.first(p), th[p]); };

        double acceptance = std::numeric_limits<double>::quiet_NaN();
        std::string status = "ok";
        try {
            MetropolisConfig mc;
            mc.steps = cfg.draws;
            mc.burn_in = cfg.burn_in;
            mc.thin = cfg.thin;
            mc.adapt = true;
            mc.seed = derive_seed(cell_seed, 0);
            mc.step_scale.resize(p + 1);
            const double shrink = std::min(1.0, std::sqrt(lam) / ols_sd.maxCoeff());
            for (std::size_t j = 0; j < p; ++j) mc.step_scale[j] = 2.4 / std::sqrt(double(p)) * ols_sd(j) * shrink;
            mc.step_scale[p] = 2.4 * sigma_hat / std::sqrt(2.0 * static_cast<double>(data.n()));
            std::vector<std::size_t> beta_block(p);
            for (std::size_t j = 0; j < p; ++j) beta_block[j] = j;
            mc.blocks = {beta_block, {p}};
            std::vector<double> init(ols.data(), ols.data() + p);
            init.push_back(std::clamp(sigma_hat, sc.sigma_lower + 0.01 * (sc.sigma_upper - sc.sigma_lower),
                                      sc.sigma_upper - 0.01 * (sc.sigma_upper - sc.sigma_lower)));
            const auto lp = batch.log_prior;
            const auto ll = batch.log_lik;
            const auto chain = rw_metropolis(
                [lp, ll](std::span<const double> th) {
                    const double a = lp(th);
                    return a == -kInf ? -kInf : a + ll(th);
                },
                init, mc);
            acceptance = chain.acceptance_rate;
            batch.posterior_draws = chain.draws;
            batch.prior_draws = sample_prior(sc, p, batch.posterior_draws.size(), derive_seed(cell_seed, 1));
        } catch (const std::exception& e) {
            status = std::string("chain failed: ") + e.what();
        }

        if (status != "ok") {
            for (Target t : metrics) {
                rows.push_back({lam, to_string(kind), to_string(t), std::numeric_limits<double>::quiet_NaN(),
                                std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                                acceptance, status});
            }
            return;
        }
        const CompatReport rep = postmean_suite(batch, {metrics.begin(), metrics.end()});
        for (Target t : metrics) {
            const Estimate& e = rep.estimates.at(to_string(t));
            std::string st = e.ok ? "ok" : "failed: " + e.error;
            if (e.ok && e.value > 1.0) st = "above-one";
            if (e.ok && !e.warnings.empty()) st += "; " + e.warnings.front();
            rows.push_back({lam, to_string(kind), to_string(t), e.value, e.mc_se, e.ess, acceptance, st});
        }
    });

    Table table({"lambda_sq", "prior_kind", "metric", "estimate", "mc_se", "ess", "acceptance", "status"});
    for (auto& rows : cell_rows) {
        for (auto& r : rows) table.add_row(std::move(r));
    }
    return table;
}

Table prior_prior_curve(const PriorPriorConfig& cfg) {
    if (cfg.lambda_sq.empty()) throw ValidationError("prior_prior_curve: lambda_sq grid is empty");
    if (cfg.p < 1) throw ValidationError("prior_prior_curve: p must be >= 1");
    if (cfg.draws < 2) throw ValidationError("prior_prior_curve: need at least 2 draws");
    const std::size_t p = cfg.p;
    const std::size_t P = p;

    // Standardised streams, one pair per centre, reused for every lambda.
    struct Base {
        std::vector<double> z;  // N(0,1)
        std::vector<double> l;  // Laplace(0,1)
    };
    std::vector<Base> base(cfg.centers.size());
    for (std::size_t k = 0; k < cfg.centers.size(); ++k) {
        Rng rz(derive_seed(cfg.seed, 2 * k));
        Rng rl(derive_seed(cfg.seed, 2 * k + 1));
        base[k].z.resize(cfg.draws * P);
        base[k].l.resize(cfg.draws * P);
        for (auto& v : base[k].z) v = rz.normal();
        for (auto& v : base[k].l) v = rl.laplace(1.0);
    }

    const std::size_t cells = cfg.centers.size() * cfg.lambda_sq.size();
    std::vector<std::vector<Table::Cell>> rows(cells);
    parallel_for(cells, cfg.threads, [&](std::size_t c) {
        const std::size_t k = c / cfg.lambda_sq.size();
        const double center = cfg.centers[k];
        const double lam = cfg.lambda_sq[c % cfg.lambda_sq.size()];
        ShrinkageConfig g1{PriorKind::gaussian, lam, std::vector<double>(P, center)};
        ShrinkageConfig l2{PriorKind::laplace, lam, {}};
        const double sd = std::sqrt(lam);
        const double b = l2.laplace_scale();
        std::vector<double> d1(base[k].z.size()), d2(base[k].l.size());
        for (std::size_t i = 0; i < d1.size(); ++i) d1[i] = center + sd * base[k].z[i];
        for (std::size_t i = 0; i < d2.size(); ++i) d2[i] = b * base[k].l[i];
        SampleBatch batch;
        batch.seed = cfg.seed;
        batch.prior_draws = Draws(P, std::move(d1));
        batch.prior2_draws = Draws(P, std::move(d2));
        batch.log_prior = [g1](std::span<const double> th) { return log_prior_beta(g1, th); };
        batch.log_prior2 = [l2](std::span<const double> th) { return log_prior_beta(l2, th); };
        const CompatReport rep = postmean_suite(batch, {Target::kappa_pi1_pi2});
        const Estimate& e = rep.estimates.at("kappa_pi1_pi2");
        rows[c] = {lam, center, e.value, e.mc_se, e.ess};
    });

    Table table({"lambda_sq", "center", "estimate", "mc_se", "ess"});
    for (auto& r : rows) table.add_row(std::move(r));
    return table;
}

}  // namespace bayesgeom::regression
