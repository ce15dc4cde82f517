#include "bayesgeom/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

#include "bayesgeom/conjugate.hpp"
#include "bayesgeom/errors.hpp"
#include "bayesgeom/estimators.hpp"
#include "bayesgeom/expfam.hpp"
#include "bayesgeom/parallel.hpp"
#include "bayesgeom/regression.hpp"
#include "bayesgeom/report.hpp"

namespace bayesgeom::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double degrees(double kappa) { return std::acos(std::clamp(kappa, 0.0, 1.0)) * 180.0 / std::numbers::pi; }

const json& params_of(const json& cfg) { return cfg.contains("params") ? cfg.at("params") : cfg; }

double num(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ValidationError("missing parameter '" + key + "'");
    if (!j.at(key).is_number()) throw ValidationError("parameter '" + key + "' must be a number");
    return j.at(key).get<double>();
}

double num_or(const json& j, const std::string& key, double fallback) {
    return j.contains(key) ? num(j, key) : fallback;
}

unsigned whole(double v, const std::string& key) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 4e9) {
        throw ValidationError("parameter '" + key + "' must be a nonnegative integer");
    }
    return static_cast<unsigned>(v);
}

unsigned count(const json& j, const std::string& key) { return whole(num(j, key), key); }

std::size_t size_or(const json& j, const std::string& key, std::size_t fallback) {
    return j.contains(key) ? whole(num(j, key), key) : fallback;
}

std::uint64_t require_seed(const json& cfg, const RunOptions& opt) {
    if (opt.seed) return *opt.seed;
    if (cfg.contains("mcmc") && cfg.at("mcmc").contains("seed")) {
        const json& s = cfg.at("mcmc").at("seed");
        if (!s.is_number_integer() || s.get<long long>() < 0) {
            throw ValidationError("mcmc.seed must be a nonnegative integer");
        }
        return s.get<std::uint64_t>();
    }
    throw ValidationError("a seed is required whenever a Monte Carlo estimator is used (mcmc.seed or --seed)");
}

conjugate::BetaBernoulliModel bb_model(const json& p) {
    conjugate::BetaBernoulliModel m{num(p, "a"), num(p, "b"), count(p, "n"), count(p, "n1")};
    m.validate();
    return m;
}

conjugate::NIGParams nig_params(const json& p) {
    conjugate::NIGParams out{num(p, "mu0"), num(p, "eta0"), num(p, "nu0"), num(p, "sigma0sq")};
    out.validate();
    return out;
}

struct Output {
    std::optional<std::string> path;
    std::string format;
};

Output output_of(const json& cfg, const RunOptions& opt, const std::string& default_format) {
    Output o{std::nullopt, default_format};
    if (cfg.contains("output")) {
        const json& j = cfg.at("output");
        if (j.is_string()) {
            o.path = j.get<std::string>();
        } else {
            if (j.contains("path")) o.path = j.at("path").get<std::string>();
            if (j.contains("format")) o.format = j.at("format").get<std::string>();
        }
    }
    if (opt.output) o.path = *opt.output;
    if (o.format != "json" && o.format != "csv") {
        throw ValidationError("output.format must be 'json' or 'csv'");
    }
    return o;
}

json table_json(const Table& t) {
    json rows = json::array();
    for (const auto& r : t.rows()) {
        json row = json::array();
        for (const auto& c : r) {
            if (!c.is_number) {
                row.push_back(c.text);
            } else if (std::isfinite(c.number)) {
                row.push_back(c.number);
            } else {
                row.push_back(format_double(c.number));
            }
        }
        rows.push_back(row);
    }
    return {{"columns", t.columns()}, {"rows", rows}};
}

void emit(const std::string& text, const Output& o, json summary, std::ostream& out) {
    if (!o.path) {
        out << text;
        return;
    }
    write_text(*o.path, text);
    summary["status"] = "ok";
    summary["output"] = *o.path;
    out << summary.dump(2) << "\n";
}

void emit_report(const CompatReport& r, const json& cfg, const RunOptions& opt, std::ostream& out) {
    const Output o = output_of(cfg, opt, "json");
    std::string text;
    if (o.format == "json") {
        text = to_json(r).dump(2) + "\n";
    } else {
        Table t({"name", "value", "mc_se", "ess", "status"});
        for (const auto& [k, v] : r.values) t.add_row({k, v, kNaN, kNaN, "closed-form"});
        for (const auto& [k, e] : r.estimates) t.add_row({k, e.value, e.mc_se, e.ess, e.ok ? "ok" : e.error});
        text = t.to_csv();
    }
    json summary = {{"model", r.model}};
    for (const auto& [k, v] : r.values) summary["values"][k] = std::isfinite(v) ? json(v) : json(format_double(v));
    emit(text, o, summary, out);
}

void emit_table(const Table& t, const json& cfg, const RunOptions& opt, std::ostream& out, json summary) {
    const Output o = output_of(cfg, opt, "csv");
    emit(o.format == "csv" ? t.to_csv() : table_json(t).dump(2) + "\n", o, std::move(summary), out);
}

// beta-binomial ---------------------------------------------------------------

const std::vector<std::string> kBBMetrics = {"prior_norm",       "posterior_norm",   "likelihood_norm",
                                             "kappa_prior_lik",  "kappa_prior_post", "kappa_lik_post",
                                             "kappa_prior_prior", "angle_prior_lik_deg", "angle_prior_post_deg"};

double bb_metric(const json& p, const std::string& metric) {
    const auto m = bb_model(p);
    if (metric == "prior_norm") return conjugate::bb_prior_norm(m);
    if (metric == "posterior_norm") return conjugate::bb_posterior_norm(m);
    if (metric == "likelihood_norm") return conjugate::bb_likelihood_norm(m);
    if (metric == "kappa_prior_lik") return conjugate::bb_kappa_prior_lik(m);
    if (metric == "kappa_prior_post") return conjugate::bb_kappa_prior_post(m);
    if (metric == "kappa_lik_post") return conjugate::bb_kappa_lik_post(m);
    if (metric == "kappa_prior_prior") {
        return conjugate::bb_kappa_prior_prior(m.a, m.b, num_or(p, "a2", 1.0), num_or(p, "b2", 1.0));
    }
    if (metric == "angle_prior_lik_deg") return degrees(conjugate::bb_kappa_prior_lik(m));
    if (metric == "angle_prior_post_deg") return degrees(conjugate::bb_kappa_prior_post(m));
    throw ValidationError("unknown beta-binomial metric '" + metric + "'");
}

int cmd_beta_binomial(const json& cfg, const RunOptions& opt, std::ostream& out) {
    const json& p = params_of(cfg);
    const auto m = bb_model(p);
    CompatReport r;
    r.model = "beta-binomial";
    r.method = "closed-form";
    for (const auto& metric : kBBMetrics) {
        if (metric == "kappa_prior_prior" && !(p.contains("a2") || p.contains("b2"))) continue;
        r.values[metric] = bb_metric(p, metric);
    }
    const auto mc = conjugate::bb_max_compatible(m.n, m.n1);
    r.values["max_compatible_a"] = mc.a;
    r.values["max_compatible_b"] = mc.b;
    if (cfg.value("quadrature_check", false)) {
        const auto prior = conjugate::beta_field(m.a, m.b, FieldKind::prior);
        const auto post = conjugate::beta_field(m.a_post(), m.b_post(), FieldKind::posterior);
        const auto lik = conjugate::bernoulli_likelihood_field(m.n, m.n1);
        r.values["prior_norm_quadrature"] = norm(prior);
        r.values["posterior_norm_quadrature"] = norm(post);
        r.values["kappa_prior_lik_quadrature"] = compatibility(prior, lik).kappa;
        r.values["kappa_prior_post_quadrature"] = compatibility(prior, post).kappa;
    }
    emit_report(r, cfg, opt, out);
    return ok;
}

// nig ---------------------------------------------------------------------------

struct NIGInputs {
    conjugate::NIGParams prior;
    unsigned n;
    double ybar;
    double ss;
};

NIGInputs nig_inputs(const json& p) {
    const json& prior = p.contains("prior") ? p.at("prior") : p;
    const json& data = p.contains("data") ? p.at("data") : p;
    NIGInputs in{nig_params(prior), count(data, "n"), num(data, "ybar"), num(data, "ss")};
    if (in.n < 1) throw ValidationError("nig: need n >= 1");
    if (!(in.ss >= 0.0)) throw ValidationError("nig: ss must be nonnegative");
    return in;
}

double nig_metric(const NIGInputs& in, const std::string& metric) {
    if (metric == "kappa_prior_post") return conjugate::nig_kappa(in.prior, conjugate::nig_posterior(in.prior, in.n, in.ybar, in.ss));
    if (metric == "kappa_prior_lik") return conjugate::nig_kappa(in.prior, conjugate::nig_likelihood_as_nig(in.n, in.ybar, in.ss));
    if (metric == "kappa_lik_post") {
        return conjugate::nig_kappa(conjugate::nig_likelihood_as_nig(in.n, in.ybar, in.ss),
                                    conjugate::nig_posterior(in.prior, in.n, in.ybar, in.ss));
    }
    throw ValidationError("unknown nig metric '" + metric + "'");
}

int cmd_nig(const json& cfg, const RunOptions& opt, std::ostream& out) {
    const NIGInputs in = nig_inputs(params_of(cfg));
    const auto post = conjugate::nig_posterior(in.prior, in.n, in.ybar, in.ss);
    CompatReport r;
    r.model = "nig";
    r.method = "closed-form";
    r.values["posterior_mu0"] = post.mu0;
    r.values["posterior_eta0"] = post.eta0;
    r.values["posterior_nu0"] = post.nu0;
    r.values["posterior_sigma0sq"] = post.sigma0sq;
    r.values["kappa_prior_post"] = nig_metric(in, "kappa_prior_post");
    r.values["angle_prior_post_deg"] = degrees(r.values["kappa_prior_post"]);
    if (in.n > 3 && in.ss > 0.0) {
        r.values["kappa_prior_lik"] = nig_metric(in, "kappa_prior_lik");
        r.values["kappa_lik_post"] = nig_metric(in, "kappa_lik_post");
    } else {
        r.notes.push_back("likelihood is not square-integrable as an NIG member for n <= 3; kappa_prior_lik omitted");
    }
    if (cfg.value("quadrature_check", false)) {
        QuadSpec q;
        q.rel_tol = 1e-9;
        r.values["kappa_prior_post_quadrature"] =
            compatibility(conjugate::nig_field(in.prior), conjugate::nig_field(post, FieldKind::posterior), q).kappa;
    }
    emit_report(r, cfg, opt, out);
    return ok;
}

// expfam -------------------------------------------------------------------------

int cmd_expfam(const json& cfg, const RunOptions& opt, std::ostream& out) {
    const json& p = params_of(cfg);
    if (!p.contains("family")) throw ValidationError("expfam: missing 'family'");
    const auto spec = expfam::builtin(p.at("family").get<std::string>(), num_or(p, "variance", 1.0));
    if (!p.contains("prior")) throw ValidationError("expfam: missing 'prior' {tau, n0}");
    const json& pr = p.at("prior");
    expfam::ConjugateHyper h;
    h.tau = pr.at("tau").is_array() ? pr.at("tau").get<std::vector<double>>() : std::vector<double>{num(pr, "tau")};
    h.n0 = num(pr, "n0");
    if (h.tau.size() != spec.q) throw ValidationError("expfam: tau must have dimension " + std::to_string(spec.q));

    expfam::SufficientData data;
    if (!p.contains("data")) throw ValidationError("expfam: missing 'data' ({y: [...]} or {sum_t, n})");
    const json& d = p.at("data");
    if (d.contains("y")) {
        const auto ys = d.at("y").get<std::vector<double>>();
        data = expfam::summarise(spec, ys);
    } else {
        data.sum_t = d.at("sum_t").is_array() ? d.at("sum_t").get<std::vector<double>>()
                                              : std::vector<double>{num(d, "sum_t")};
        data.n = num(d, "n");
        if (data.sum_t.size() != spec.q) throw ValidationError("expfam: sum_t has the wrong dimension");
    }

    CompatReport r;
    r.model = "expfam:" + spec.name;
    r.method = "normalizing-constants";
    for (auto pair : {expfam::Pair::prior_lik, expfam::Pair::prior_post, expfam::Pair::post_lik}) {
        r.values["kappa_" + expfam::to_string(pair)] = expfam::ef_kappa(spec, h, data, pair);
        r.values["affine_kappa_" + expfam::to_string(pair)] = expfam::ef_affine_kappa(spec, h, data, pair);
    }
    const auto mc = expfam::ef_max_compatible(spec, data);
    for (std::size_t i = 0; i < mc.tau.size(); ++i) r.values["max_compatible_tau_" + std::to_string(i)] = mc.tau[i];
    r.values["max_compatible_n0"] = mc.n0;
    emit_report(r, cfg, opt, out);
    return ok;
}

// estimate -------------------------------------------------------------------------

SamplingMethod method_of(const json& cfg) {
    const std::string m = cfg.contains("mcmc") ? cfg.at("mcmc").value("method", "direct") : "direct";
    if (m == "direct") return SamplingMethod::direct;
    if (m == "rw_metropolis") return SamplingMethod::rw_metropolis;
    throw ValidationError("mcmc.method must be 'direct' or 'rw_metropolis'");
}

std::size_t draws_of(const json& cfg, std::size_t fallback) {
    const std::size_t n = cfg.contains("mcmc") ? size_or(cfg.at("mcmc"), "draws", fallback) : fallback;
    if (n < 2) throw ValidationError("mcmc.draws must be at least 2");
    return n;
}

void load_draws(SampleBatch& batch, const json& cfg) {
    if (cfg.contains("posterior_draws_file")) {
        batch.posterior_draws = read_draws_csv(cfg.at("posterior_draws_file").get<std::string>());
    }
    if (cfg.contains("prior_draws_file")) {
        batch.prior_draws = read_draws_csv(cfg.at("prior_draws_file").get<std::string>());
    }
    for (const Draws* d : {&batch.posterior_draws, &batch.prior_draws}) {
        if (d->dim() != 1) throw ValidationError("beta-binomial draws must have exactly one column");
    }
}

int cmd_estimate(const json& cfg, const RunOptions& opt, std::ostream& out) {
    const std::string model = cfg.value("model", "beta-binomial");
    if (model != "beta-binomial") throw ValidationError("estimate: only model 'beta-binomial' is built in");
    const json& p = params_of(cfg);
    const auto m = bb_model(p);
    const std::uint64_t seed = require_seed(cfg, opt);
    const std::size_t draws = draws_of(cfg, 100000);

    std::set<Target> targets;
    if (cfg.contains("targets")) {
        for (const auto& t : cfg.at("targets")) targets.insert(target_from_string(t.get<std::string>()));
    } else {
        targets = {Target::norm_p, Target::norm_pi, Target::norm_lik_local, Target::kappa_pi_lik_local,
                   Target::kappa_pi_p, Target::kappa_lik_p_local};
    }

    SampleBatch batch = beta_bernoulli_batch(m, draws, seed, method_of(cfg));
    load_draws(batch, cfg);

    CompatReport ref_values;
    ref_values.values["norm_p"] = conjugate::bb_posterior_norm(m);
    ref_values.values["norm_pi"] = conjugate::bb_prior_norm(m);
    ref_values.values["norm_lik_local"] = conjugate::bb_likelihood_norm(m);
    ref_values.values["kappa_pi_lik_local"] = conjugate::bb_kappa_prior_lik(m);
    ref_values.values["kappa_pi_p"] = conjugate::bb_kappa_prior_post(m);
    ref_values.values["kappa_lik_p_local"] = conjugate::bb_kappa_lik_post(m);

    if (targets.count(Target::kappa_pi1_pi2)) {
        const json& p2 = cfg.contains("prior2") ? cfg.at("prior2") : json::object();
        const double a2 = num_or(p2, "a", 1.0), b2 = num_or(p2, "b", 1.0);
        conjugate::BetaBernoulliModel m2{a2, b2, 0, 0};
        m2.validate();
        const SampleBatch other = beta_bernoulli_batch(m2, draws, derive_seed(seed, 2));
        batch.prior2_draws = other.prior_draws;
        batch.log_prior2 = other.log_prior;
        ref_values.values["kappa_pi1_pi2"] = conjugate::bb_kappa_prior_prior(m.a, m.b, a2, b2);
    }

    SuiteOptions so;
    so.batches = cfg.contains("mcmc") ? size_or(cfg.at("mcmc"), "batches", 40) : 40;
    CompatReport r = postmean_suite(batch, targets, so);
    r.model = "beta-binomial";
    for (const auto& [k, v] : ref_values.values) {
        if (targets.count(target_from_string(k))) r.values[k + "_closed_form"] = v;
    }
    if (cfg.value("export_draws", false)) {
        const Output o = output_of(cfg, opt, "json");
        if (!o.path) throw ValidationError("export_draws needs an output path");
        write_draws_csv(*o.path + ".posterior.csv", batch.posterior_draws, {"theta"});
        write_draws_csv(*o.path + ".prior.csv", batch.prior_draws, {"theta"});
        r.notes.push_back("draws exported next to the report");
    }
    emit_report(r, cfg, opt, out);
    return ok;
}

// trace ------------------------------------------------------------------------------

int cmd_trace(const json& cfg, const RunOptions& opt, std::ostream& out) {
    const json& p = params_of(cfg);
    const unsigned n = p.contains("n") ? count(p, "n") : 10;
    const unsigned n1 = p.contains("n1") ? count(p, "n1") : 2;
    std::vector<std::pair<double, double>> settings = {{1, 1}, {2, 1}, {10, 1}};
    if (cfg.contains("settings")) {
        settings.clear();
        for (const auto& s : cfg.at("settings")) {
            if (s.is_array() && s.size() == 2) {
                settings.emplace_back(s[0].get<double>(), s[1].get<double>());
            } else {
                settings.emplace_back(num(s, "a"), num(s, "b"));
            }
        }
    }
    std::vector<std::string> estimators = {"harmonic", "stable"};
    if (cfg.contains("estimators")) estimators = cfg.at("estimators").get<std::vector<std::string>>();
    for (const auto& e : estimators) {
        if (e != "harmonic" && e != "stable") throw ValidationError("unknown estimator '" + e + "'");
    }
    const std::uint64_t seed = require_seed(cfg, opt);
    const std::size_t draws = draws_of(cfg, 10000);
    const std::size_t stride = size_or(cfg, "stride", 1);
    if (stride < 1) throw ValidationError("stride must be >= 1");

    Table t({"prior_a", "prior_b", "estimator", "draw", "estimate", "reference", "flag"});
    json summary = json::array();
    for (std::size_t s = 0; s < settings.size(); ++s) {
        const conjugate::BetaBernoulliModel m{settings[s].first, settings[s].second, n, n1};
        m.validate();
        SampleBatch batch = beta_bernoulli_batch(m, draws, derive_seed(seed, s), method_of(cfg));
        load_draws(batch, cfg);
        const double ref = conjugate::bb_kappa_prior_post(m);
        for (const auto& name : estimators) {
            const RunningTrace tr = name == "harmonic" ? kappa_pp_harmonic(batch, stride) : kappa_pp_stable(batch, stride);
            for (const auto& pt : tr.estimates) {
                t.add_row({m.a, m.b, name, static_cast<double>(pt.b), pt.value, ref, tr.flagged ? tr.flag : ""});
            }
            summary.push_back({{"a", m.a},
                               {"b", m.b},
                               {"estimator", name},
                               {"final", tr.estimates.back().value},
                               {"reference", ref},
                               {"excluded_draws", tr.excluded_draws}});
        }
    }
    emit_table(t, cfg, opt, out, {{"traces", summary}});
    return ok;
}

// sweep --------------------------------------------------------------------------------

int cmd_sweep(const json& cfg, const RunOptions& opt, std::ostream& out) {
    const std::string model = cfg.value("model", "beta-binomial");
    std::vector<std::string> allowed, metrics;
    if (model == "beta-binomial") {
        allowed = {"a", "b", "n", "n1", "a2", "b2"};
        metrics = {"kappa_prior_lik", "kappa_prior_post"};
    } else if (model == "nig") {
        allowed = {"mu0", "eta0", "nu0", "sigma0sq", "n", "ybar", "ss"};
        metrics = {"kappa_prior_post"};
    } else {
        throw ValidationError("sweep: model must be 'beta-binomial' or 'nig'");
    }
    if (cfg.contains("metrics")) metrics = cfg.at("metrics").get<std::vector<std::string>>();
    if (metrics.empty()) throw ValidationError("sweep: no metrics selected");
    if (!cfg.contains("grid") || !cfg.at("grid").is_array() || cfg.at("grid").empty()) {
        throw ValidationError("sweep: 'grid' must be a non-empty list of axes");
    }
    std::vector<GridAxis> axes;
    std::vector<std::vector<double>> values;
    for (const auto& a : cfg.at("grid")) {
        axes.push_back(parse_axis(a));
        const auto& name = axes.back().parameter;
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
            throw ValidationError("sweep: grid axis '" + name + "' is not a parameter of model " + model);
        }
        for (std::size_t k = 0; k + 1 < axes.size(); ++k) {
            if (axes[k].parameter == name) throw ValidationError("sweep: axis '" + name + "' given twice");
        }
        values.push_back(axes.back().values());
    }

    // Flat parameter object for the model; nested prior/data blocks are merged.
    json base = json::object();
    const json& p = params_of(cfg);
    for (const char* block : {"prior", "data"}) {
        if (p.contains(block)) base.update(p.at(block));
    }
    for (const auto& [k, v] : p.items()) {
        if (k != "prior" && k != "data") base[k] = v;
    }

    std::size_t cells = 1;
    for (const auto& v : values) cells *= v.size();
    std::vector<std::vector<double>> results(cells);
    const auto point = [&](std::size_t c) {
        json q = base;
        std::vector<double> coords(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            coords[k] = values[k][c % values[k].size()];
            c /= values[k].size();
            q[axes[k].parameter] = coords[k];
        }
        return std::make_pair(q, coords);
    };
    for (const auto& m : metrics) {
        const auto& known = model == "beta-binomial" ? kBBMetrics
                                                     : std::vector<std::string>{"kappa_prior_post", "kappa_prior_lik", "kappa_lik_post"};
        if (std::find(known.begin(), known.end(), m) == known.end()) {
            throw ValidationError("sweep: unknown metric '" + m + "' for model " + model);
        }
    }

    parallel_for(cells, opt.threads, [&](std::size_t c) {
        const auto [q, coords] = point(c);
        std::vector<double> row = coords;
        if (model == "beta-binomial") {
            for (const auto& m : metrics) row.push_back(bb_metric(q, m));
        } else {
            const NIGInputs in = nig_inputs(q);
            for (const auto& m : metrics) row.push_back(nig_metric(in, m));
        }
        results[c] = std::move(row);
    });

    std::vector<std::string> columns;
    for (const auto& a : axes) columns.push_back(a.parameter);
    columns.insert(columns.end(), metrics.begin(), metrics.end());
    Table t(columns);
    for (const auto& r : results) t.add_row({r.begin(), r.end()});

    json argmax = json::object();
    for (std::size_t k = 0; k < metrics.size(); ++k) {
        const std::size_t col = axes.size() + k;
        std::size_t best = 0;
        for (std::size_t c = 1; c < cells; ++c) {
            if (results[c][col] > results[best][col]) best = c;
        }
        json at = json::object();
        for (std::size_t a = 0; a < axes.size(); ++a) at[axes[a].parameter] = results[best][a];
        argmax[metrics[k]] = {{"value", results[best][col]}, {"at", at}};
    }
    emit_table(t, cfg, opt, out, {{"model", model}, {"cells", cells}, {"argmax", argmax}});
    return ok;
}

// regression -----------------------------------------------------------------------------

int cmd_regression(const json& cfg, const RunOptions& opt, std::ostream& out) {
    const std::string part = cfg.value("part", "kappa");
    std::vector<double> grid;
    if (cfg.contains("grid")) {
        for (const auto& a : cfg.at("grid")) {
            const GridAxis axis = parse_axis(a);
            if (axis.parameter != "lambda_sq") throw ValidationError("regression: the only grid axis is lambda_sq");
            grid = axis.values();
        }
    }
    if (grid.empty()) throw ValidationError("regression: a lambda_sq grid axis is required");
    for (double v : grid) {
        if (!(v > 0.0)) throw ValidationError("regression: lambda_sq values must be positive");
    }
    const json notes = json::array({"theta = (beta, sigma) treated jointly; sigma ~ Uniform(0, 2)",
                                    "norms are for the beta block; the sigma prior contributes the same factor to "
                                    "both prior kinds",
                                    "likelihood terms use local (prior-support) versions"});

    if (part == "prior_prior") {
        regression::PriorPriorConfig pc;
        pc.lambda_sq = grid;
        if (cfg.contains("centers")) pc.centers = cfg.at("centers").get<std::vector<double>>();
        pc.p = size_or(cfg, "p", 8);
        pc.draws = draws_of(cfg, 100000);
        pc.seed = require_seed(cfg, opt);
        pc.threads = opt.threads;
        emit_table(regression::prior_prior_curve(pc), cfg, opt, out, {{"part", part}, {"notes", notes}});
        return ok;
    }

    regression::RegressionData data;
    const json d = cfg.value("data", json::object());
    if (d.contains("path")) {
        data = regression::load_table(d.at("path").get<std::string>(), d.value("response", "lpsa"));
    } else {
        const json s = d.value("synthetic", json::object());
        data = regression::synthetic_fixture(s.value("seed", std::uint64_t{0}), size_or(s, "n", 97), size_or(s, "p", 8));
    }

    if (part == "norms") {
        Table t({"lambda_sq", "prior_kind", "norm"});
        for (double lam : grid) {
            for (auto kind : {regression::PriorKind::gaussian, regression::PriorKind::laplace}) {
                regression::ShrinkageConfig sc;
                sc.prior_kind = kind;
                sc.lambda_sq = lam;
                t.add_row({lam, regression::to_string(kind), regression::prior_norm_shrinkage(sc, data.p())});
            }
        }
        emit_table(t, cfg, opt, out, {{"part", part}, {"p", data.p()}, {"notes", notes}});
        return ok;
    }
    if (part != "kappa") throw ValidationError("regression: part must be 'kappa', 'prior_prior' or 'norms'");

    regression::CurveConfig cc;
    cc.lambda_sq = grid;
    if (cfg.contains("prior_kinds")) {
        cc.kinds.clear();
        for (const auto& k : cfg.at("prior_kinds")) cc.kinds.push_back(regression::prior_kind_from_string(k.get<std::string>()));
    }
    cc.draws = draws_of(cfg, 20000);
    if (cfg.contains("mcmc")) {
        cc.burn_in = size_or(cfg.at("mcmc"), "burn_in", 0);
        cc.thin = std::max<std::size_t>(1, size_or(cfg.at("mcmc"), "thin", 1));
    }
    cc.seed = require_seed(cfg, opt);
    cc.threads = opt.threads;
    emit_table(regression::kappa_curves(data, cc), cfg, opt, out,
               {{"part", part}, {"n", data.n()}, {"p", data.p()}, {"notes", notes}});
    return ok;
}

}  // namespace

std::vector<double> GridAxis::values() const {
    std::vector<double> v;
    if (points > 0) {
        if (points == 1) {
            v.push_back(min);
        } else {
            for (std::size_t i = 0; i < points; ++i) {
                const double t = static_cast<double>(i) / static_cast<double>(points - 1);
                v.push_back(log_scale ? std::exp(std::log(min) + t * (std::log(max) - std::log(min)))
                                      : min + t * (max - min));
            }
            v.back() = max;
        }
    }
    v.insert(v.end(), include.begin(), include.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

GridAxis parse_axis(const json& j) {
    GridAxis a;
    if (!j.contains("parameter")) throw ValidationError("grid axis: missing 'parameter'");
    a.parameter = j.at("parameter").get<std::string>();
    a.points = size_or(j, "points", 0);
    if (j.contains("include")) a.include = j.at("include").get<std::vector<double>>();
    if (a.points > 0) {
        a.min = num(j, "min");
        a.max = num(j, "max");
        if (!(a.min <= a.max)) throw ValidationError("grid axis " + a.parameter + ": min must not exceed max");
    }
    const std::string scale = j.value("scale", "linear");
    if (scale != "linear" && scale != "log") throw ValidationError("grid axis " + a.parameter + ": scale must be linear or log");
    a.log_scale = scale == "log";
    if (a.log_scale && a.points > 0 && !(a.min > 0.0)) {
        throw ValidationError("grid axis " + a.parameter + ": log scale needs min > 0");
    }
    if (a.points == 0 && a.include.empty()) throw ValidationError("grid axis " + a.parameter + " has no points");
    return a;
}

int run(const json& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
    try {
        if (!config.is_object()) throw ValidationError("configuration must be a JSON object");
        if (!config.contains("command")) throw ValidationError("configuration has no 'command'");
        if (options.threads < 1) throw ValidationError("--threads must be >= 1");
        const std::string command = config.at("command").get<std::string>();
        if (command == "beta-binomial") return cmd_beta_binomial(config, options, out);
        if (command == "nig") return cmd_nig(config, options, out);
        if (command == "expfam") return cmd_expfam(config, options, out);
        if (command == "estimate") return cmd_estimate(config, options, out);
        if (command == "sweep") return cmd_sweep(config, options, out);
        if (command == "regression") return cmd_regression(config, options, out);
        if (command == "trace") return cmd_trace(config, options, out);
        throw ValidationError("unknown command '" + command +
                              "' (expected beta-binomial, nig, expfam, estimate, sweep, regression or trace)");
    } catch (const NumericalError& e) {
        err << "numerical error in " << e.term() << ": " << e.what() << "\n";
        return numerical_error;
    } catch (const json::exception& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return validation_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return validation_error;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Geometry of Bayesian inference: norms, angles and compatibility"};
    std::string config_path;
    std::string output;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    auto* out_opt = app.add_option("--output", output, "output path (overrides the config)");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads for sweeps and regression grids")
        ->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : validation_error;
    }
    RunOptions opts;
    if (*out_opt) opts.output = output;
    if (*seed_opt) opts.seed = seed;
    opts.threads = threads;

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config " << config_path << "\n";
        return validation_error;
    }
    json config;
    try {
        config = json::parse(in);
    } catch (const json::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return validation_error;
    }
    return run(config, opts, std::cout, std::cerr);
}

}  // namespace bayesgeom::cli
