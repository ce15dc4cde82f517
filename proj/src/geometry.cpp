#include "bayesgeom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bayesgeom/errors.hpp"

namespace bayesgeom {

namespace {

// Loose settings for the square-integrability probe run at construction.
QuadSpec l2_probe_spec() {
    QuadSpec spec;
    spec.rel_tol = 1e-4;
    spec.abs_tol = 0.0;
    spec.max_subdivisions = 200;
    return spec;
}

double sum_logs(double a, double b) {
    if (a == -kInf || b == -kInf) return -kInf;
    return a + b;
}

LogQuadResult checked_log_integrate(const Integrand& log_f, const SupportRegion& region,
                                    const QuadSpec& spec, const Breakpoints& cuts,
                                    const std::string& term) {
    LogQuadResult r = log_integrate(log_f, region, spec, cuts);
    if (!r.converged) {
        throw NumericalError(term, "quadrature for " + term + " did not converge (relative error " +
                                       std::to_string(r.rel_error) + ")");
    }
    return r;
}

// Support edges of `inner` that fall strictly inside `outer`, as cuts.
Breakpoints support_edges(const SupportRegion& inner) {
    Breakpoints cuts(inner.dim());
    for (std::size_t a = 0; a < inner.dim(); ++a) {
        cuts[a] = {inner.lower(a), inner.upper(a)};
    }
    return cuts;
}

}  // namespace

ScalarField::ScalarField(Unchecked, LogFunction eval_log, SupportRegion support, FieldKind kind,
                         Breakpoints breakpoints)
    : eval_log_(std::move(eval_log)),
      support_(std::move(support)),
      kind_(kind),
      breakpoints_(std::move(breakpoints)) {
    if (!eval_log_) throw std::invalid_argument("ScalarField: empty log function");
}

ScalarField::ScalarField(LogFunction eval_log, SupportRegion support, FieldKind kind,
                         Breakpoints breakpoints)
    : ScalarField(Unchecked{}, std::move(eval_log), std::move(support), kind, std::move(breakpoints)) {
    const auto twice = [this](std::span<const double> x) {
        const double l = this->eval_log(x);
        return l == -kInf ? -kInf : 2.0 * l;
    };
    LogQuadResult r;
    try {
        r = log_integrate(twice, support_, l2_probe_spec(), breakpoints_);
    } catch (const NumericalError& e) {
        throw NotSquareIntegrable("||f||^2", std::string("ScalarField: ") + e.what());
    }
    if (!r.converged || (!std::isfinite(r.log_value) && r.log_value != -kInf)) {
        throw NotSquareIntegrable("||f||^2",
                                  "ScalarField: function is not square-integrable over its support");
    }
}

ScalarField ScalarField::unchecked(LogFunction eval_log, SupportRegion support, FieldKind kind,
                                   Breakpoints breakpoints) {
    return ScalarField(Unchecked{}, std::move(eval_log), std::move(support), kind,
                       std::move(breakpoints));
}

double ScalarField::eval_log(std::span<const double> theta) const {
    if (!support_.contains(theta)) return -kInf;
    return eval_log_(theta);
}

double ScalarField::operator()(std::span<const double> theta) const {
    return std::exp(eval_log(theta));
}

ScalarField ScalarField::scaled(double c) const {
    if (!(c > 0.0)) throw std::domain_error("ScalarField::scaled: factor must be positive");
    const double lc = std::log(c);
    auto f = eval_log_;
    return unchecked([f, lc](std::span<const double> x) { return sum_logs(f(x), lc); }, support_,
                     kind_, breakpoints_);
}

ScalarField ScalarField::sqrt() const {
    auto f = eval_log_;
    return unchecked(
        [f](std::span<const double> x) {
            const double l = f(x);
            return l == -kInf ? -kInf : 0.5 * l;
        },
        support_, kind_, breakpoints_);
}

ScalarField ScalarField::times(const ScalarField& other, FieldKind kind) const {
    auto region = support_.intersect(other.support_);
    if (!region) throw std::invalid_argument("ScalarField::times: supports are disjoint");
    auto f = eval_log_;
    auto g = other.eval_log_;
    const SupportRegion a = support_, b = other.support_;
    return unchecked(
        [f, g, a, b](std::span<const double> x) {
            if (!a.contains(x) || !b.contains(x)) return -kInf;
            return sum_logs(f(x), g(x));
        },
        *region, kind, merge_breakpoints(breakpoints_, other.breakpoints_));
}

double log_inner_product(const ScalarField& g, const ScalarField& h, const QuadSpec& spec) {
    if (g.dim() != h.dim()) throw std::invalid_argument("inner_product: dimension mismatch");
    const auto region = g.support().intersect(h.support());
    if (!region) return -kInf;
    const auto integrand = [&](std::span<const double> x) {
        return sum_logs(g.eval_log(x), h.eval_log(x));
    };
    return checked_log_integrate(integrand, *region, spec,
                                 merge_breakpoints(g.breakpoints(), h.breakpoints()), "<g,h>")
        .log_value;
}

double inner_product(const ScalarField& g, const ScalarField& h, const QuadSpec& spec) {
    return std::exp(log_inner_product(g, h, spec));
}

double log_norm_sq(const ScalarField& g, const QuadSpec& spec) {
    const auto integrand = [&](std::span<const double> x) {
        const double l = g.eval_log(x);
        return l == -kInf ? -kInf : 2.0 * l;
    };
    return checked_log_integrate(integrand, g.support(), spec, g.breakpoints(), "||g||^2").log_value;
}

double norm(const ScalarField& g, const QuadSpec& spec) {
    return std::exp(0.5 * log_norm_sq(g, spec));
}

namespace {

GeomSummary summarise(double log_inner, double log_ng2, double log_nh2) {
    if (log_ng2 == -kInf || log_nh2 == -kInf) {
        throw std::domain_error("compatibility: zero-norm input");
    }
    GeomSummary s;
    s.norm_g = std::exp(0.5 * log_ng2);
    s.norm_h = std::exp(0.5 * log_nh2);
    s.inner = std::exp(log_inner);
    s.kappa_raw = log_inner == -kInf ? 0.0 : std::exp(log_inner - 0.5 * (log_ng2 + log_nh2));
    s.kappa = std::clamp(s.kappa_raw, 0.0, 1.0);
    s.angle_deg = std::acos(s.kappa) * 180.0 / std::numbers::pi;
    return s;
}

}  // namespace

GeomSummary compatibility(const ScalarField& g, const ScalarField& h, const QuadSpec& spec) {
    const double lg = log_norm_sq(g, spec);
    const double lh = log_norm_sq(h, spec);
    return summarise(log_inner_product(g, h, spec), lg, lh);
}

double local_compatibility(const ScalarField& pi, const ScalarField& ell, const QuadSpec& spec) {
    if (pi.dim() != ell.dim()) throw std::invalid_argument("local_compatibility: dimension mismatch");
    const double lpi = log_norm_sq(pi, spec);
    if (lpi == -kInf) throw std::domain_error("local_compatibility: prior has zero norm");

    const auto region = pi.support().intersect(ell.support());
    if (!region) return 0.0;
    const Breakpoints cuts = merge_breakpoints(pi.breakpoints(), ell.breakpoints());

    const auto ell_sq = [&](std::span<const double> x) {
        const double l = ell.eval_log(x);
        return l == -kInf ? -kInf : 2.0 * l;
    };
    LogQuadResult local;
    try {
        local = log_integrate(ell_sq, *region, spec, cuts);
    } catch (const NumericalError& e) {
        throw NotSquareIntegrable("||ell||*", std::string("local_compatibility: ") + e.what());
    }
    if (!local.converged || local.log_value == kInf) {
        throw NotSquareIntegrable("||ell||*",
                                  "local_compatibility: likelihood is not square-integrable over "
                                  "the prior support");
    }
    if (local.log_value == -kInf) return 0.0;

    const double lip = log_inner_product(pi, ell, spec);
    if (lip == -kInf) return 0.0;
    return std::clamp(std::exp(lip - 0.5 * (lpi + local.log_value)), 0.0, 1.0);
}

double affine_compatibility(const ScalarField& g, const ScalarField& h, const QuadSpec& spec) {
    return compatibility(g.sqrt(), h.sqrt(), spec).kappa;
}

PythagorasCheck pythagoras_check(const ScalarField& pi, const SupportRegion& region,
                                 const QuadSpec& spec) {
    if (!region.bounded()) {
        throw std::invalid_argument("pythagoras_check: region must have finite Lebesgue measure");
    }
    if (region.dim() != pi.dim()) throw std::invalid_argument("pythagoras_check: dimension mismatch");
    for (std::size_t a = 0; a < region.dim(); ++a) {
        if (pi.support().lower(a) < region.lower(a) || pi.support().upper(a) > region.upper(a)) {
            throw std::invalid_argument("pythagoras_check: density support exceeds the region");
        }
    }
    const double u0 = 1.0 / region.volume();
    const Breakpoints cuts = merge_breakpoints(pi.breakpoints(), support_edges(pi.support()));

    PythagorasCheck out;
    out.norm_sq = std::exp(log_norm_sq(pi, spec));
    const auto diff_sq = [&](std::span<const double> x) {
        const double d = pi(x) - u0;
        return d * d;
    };
    const QuadResult r = integrate(diff_sq, region, spec, cuts);
    if (!r.converged) throw NumericalError("||pi-pi0||^2", "pythagoras_check: quadrature did not converge");
    out.distance_sq = r.value;
    out.uniform_norm_sq = u0;
    out.decomposition = out.distance_sq + out.uniform_norm_sq;
    out.residual = std::fabs(out.norm_sq - out.decomposition);
    return out;
}

double entropy_functional(const ScalarField& pi, const QuadSpec& spec) {
    const auto integrand = [&](std::span<const double> x) {
        const double l = pi.eval_log(x);
        if (l == -kInf) return 0.0;
        return -std::exp(l) * l;
    };
    const QuadResult r = integrate(integrand, pi.support(), spec, pi.breakpoints());
    if (!r.converged) throw NumericalError("H", "entropy_functional: quadrature did not converge");
    return r.value;
}

std::string to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::prior: return "prior";
        case FieldKind::likelihood: return "likelihood";
        case FieldKind::posterior: return "posterior";
        case FieldKind::generic: return "generic";
    }
    return "generic";
}

}  // namespace bayesgeom
