#include "bayesgeom/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "bayesgeom/errors.hpp"

namespace bayesgeom {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("log_gamma: argument must be positive and finite, got " +
                                std::to_string(x));
    }
    return boost::math::lgamma(x);
}

double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::domain_error("log_beta: arguments must be positive, got (" + std::to_string(a) +
                                ", " + std::to_string(b) + ")");
    }
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    return log_gamma(lo) + log_gamma(hi) - log_gamma(lo + hi);
}

double log_binomial(unsigned n, unsigned k) {
    if (k > n) {
        throw std::domain_error("log_binomial: k > n");
    }
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_sum_exp(std::span<const double> values) {
    double hi = -kInf;
    for (double v : values) hi = std::max(hi, v);
    if (hi == -kInf || !std::isfinite(hi)) return hi;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - hi);
    return hi + std::log(sum);
}

// ---------------------------------------------------------------------------
// SupportRegion
// ---------------------------------------------------------------------------

SupportRegion::SupportRegion(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size()) {
        throw std::invalid_argument("SupportRegion: bounds must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || !(lower_[i] < upper_[i])) {
            throw std::invalid_argument("SupportRegion: lower < upper violated on axis " +
                                        std::to_string(i));
        }
    }
}

SupportRegion SupportRegion::interval(double lower, double upper) {
    return SupportRegion({lower}, {upper});
}

SupportRegion SupportRegion::real_line() { return interval(-kInf, kInf); }

SupportRegion SupportRegion::positive_half_line() { return interval(0.0, kInf); }

bool SupportRegion::bounded() const noexcept {
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) return false;
    }
    return true;
}

double SupportRegion::volume() const noexcept {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= upper_[i] - lower_[i];
    return v;
}

bool SupportRegion::contains(std::span<const double> x) const noexcept {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!(x[i] > lower_[i] && x[i] < upper_[i])) return false;
    }
    return true;
}

std::optional<SupportRegion> SupportRegion::intersect(const SupportRegion& other) const {
    if (other.dim() != dim()) {
        throw std::invalid_argument("SupportRegion::intersect: dimension mismatch");
    }
    std::vector<double> lo(dim()), hi(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        lo[i] = std::max(lower_[i], other.lower_[i]);
        hi[i] = std::min(upper_[i], other.upper_[i]);
        if (!(lo[i] < hi[i])) return std::nullopt;
    }
    return SupportRegion(std::move(lo), std::move(hi));
}

SupportRegion SupportRegion::product(const SupportRegion& other) const {
    std::vector<double> lo = lower_, hi = upper_;
    lo.insert(lo.end(), other.lower_.begin(), other.lower_.end());
    hi.insert(hi.end(), other.upper_.begin(), other.upper_.end());
    return SupportRegion(std::move(lo), std::move(hi));
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

void QuadSpec::validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadSpec: rel_tol must be > 0");
    if (!(abs_tol >= 0.0)) throw std::invalid_argument("QuadSpec: abs_tol must be >= 0");
    if (max_subdivisions < 1) throw std::invalid_argument("QuadSpec: max_subdivisions must be >= 1");
    if (initial_panels < 1) throw std::invalid_argument("QuadSpec: initial_panels must be >= 1");
}

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class SegmentKind { finite, upper_infinite, lower_infinite };

// One piece of an axis, parametrised by t in (0,1).
struct Segment {
    double lo;
    double hi;
    SegmentKind kind;
    UnboundedTransform transform;
    // finite pieces run from hi towards lo so both ends resolve finely
    bool reversed = false;

    // Returns x(t) and writes dx/dt.
    double map(double t, double& jac) const {
        switch (kind) {
            case SegmentKind::finite:
                jac = hi - lo;
                return reversed ? hi - (hi - lo) * t : lo + (hi - lo) * t;
            case SegmentKind::upper_infinite:
            case SegmentKind::lower_infinite: {
                double s;
                if (transform == UnboundedTransform::rational) {
                    const double u = 1.0 - t;
                    s = t / u;
                    jac = 1.0 / (u * u);
                } else {
                    const double arg = 0.5 * std::numbers::pi * t;
                    const double c = std::cos(arg);
                    s = std::tan(arg);
                    jac = 0.5 * std::numbers::pi / (c * c);
                }
                return kind == SegmentKind::upper_infinite ? lo + s : hi - s;
            }
        }
        return 0.0;
    }
};

std::vector<Segment> axis_segments(double lower, double upper, const std::vector<double>* cuts,
                                   UnboundedTransform transform) {
    std::vector<double> points;
    if (cuts) {
        for (double c : *cuts) {
            if (std::isfinite(c) && c > lower && c < upper) points.push_back(c);
        }
    }
    if (!std::isfinite(lower) && !std::isfinite(upper)) points.push_back(0.0);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    std::vector<double> edges;
    edges.push_back(lower);
    edges.insert(edges.end(), points.begin(), points.end());
    edges.push_back(upper);

    std::vector<Segment> out;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i], hi = edges[i + 1];
        SegmentKind kind = SegmentKind::finite;
        if (!std::isfinite(hi)) kind = SegmentKind::upper_infinite;
        if (!std::isfinite(lo)) kind = SegmentKind::lower_infinite;
        if (kind == SegmentKind::finite) {
            const double mid = 0.5 * (lo + hi);
            out.push_back({lo, mid, kind, transform, false});
            out.push_back({mid, hi, kind, transform, true});
        } else {
            out.push_back({lo, hi, kind, transform});
        }
    }
    return out;
}

struct PanelEstimate {
    double value;
    double error;
};

// Integrates g(x(t)) x'(t) over [t0, t1] with the 15-point Kronrod rule;
// error estimate as in QUADPACK qk15.
template <typename G>
PanelEstimate kronrod15(const G& g, const Segment& seg, double t0, double t1, std::size_t& evals) {
    const double centre = 0.5 * (t0 + t1);
    const double half = 0.5 * (t1 - t0);

    auto eval = [&](double t) {
        double jac = 0.0;
        const double x = seg.map(t, jac);
        // nodes that round onto a segment edge carry no measure
        if (!(x > seg.lo && x < seg.hi)) return 0.0;
        const double v = g(x);
        ++evals;
        if (std::isnan(v)) {
            throw NumericalError("integrand", "integrate: integrand returned NaN at x=" +
                                                  std::to_string(x));
        }
        if (v == 0.0) return 0.0;
        const double w = v * jac;
        if (!std::isfinite(w)) {
            throw NumericalError("integrand", "integrate: non-finite integrand value at x=" +
                                                  std::to_string(x));
        }
        return w;
    };

    std::array<double, 7> f1{}, f2{};
    const double fc = eval(centre);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::fabs(resk);
    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        const double dx = half * kXgk[jtw];
        const double a = eval(centre - dx);
        const double b = eval(centre + dx);
        f1[jtw] = a;
        f2[jtw] = b;
        resg += kWg[j] * (a + b);
        resk += kWgk[jtw] * (a + b);
        resabs += kWgk[jtw] * (std::fabs(a) + std::fabs(b));
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        const double dx = half * kXgk[jtwm1];
        const double a = eval(centre - dx);
        const double b = eval(centre + dx);
        f1[jtwm1] = a;
        f2[jtwm1] = b;
        resk += kWgk[jtwm1] * (a + b);
        resabs += kWgk[jtwm1] * (std::fabs(a) + std::fabs(b));
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::fabs(f1[j] - reskh) + std::fabs(f2[j] - reskh));
    }
    const double result = resk * half;
    resabs *= std::fabs(half);
    resasc *= std::fabs(half);
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();
    if (resabs > tiny / (50.0 * eps)) {
        err = std::max(eps * 50.0 * resabs, err);
    }
    return {result, err};
}

struct Panel {
    std::size_t segment;
    double t0;
    double t1;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

// Globally adaptive 1-D integration over the union of segments.
template <typename G>
QuadResult integrate_axis(const G& g, const std::vector<Segment>& segments, const QuadSpec& spec,
                          double rel_tol, double abs_tol) {
    QuadResult out;
    std::vector<Panel> heap;
    std::vector<Panel> frozen;
    double total = 0.0, total_err = 0.0;
    const auto tol = [&](double v) { return std::max(abs_tol, rel_tol * std::fabs(v)); };
    // Running totals drift when a huge panel error is replaced by small
    // ones, so they are recomputed before convergence is accepted.
    const auto resum = [&] {
        total = 0.0;
        total_err = 0.0;
        for (const auto* set : {&heap, &frozen}) {
            for (const auto& p : *set) {
                total += p.value;
                total_err += p.error;
            }
        }
    };

    for (std::size_t s = 0; s < segments.size(); ++s) {
        const int panels = segments[s].kind == SegmentKind::finite ? std::max(1, spec.initial_panels / 2)
                                                                   : spec.initial_panels;
        for (int k = 0; k < panels; ++k) {
            const double t0 = static_cast<double>(k) / panels;
            const double t1 = static_cast<double>(k + 1) / panels;
            const auto est = kronrod15(g, segments[s], t0, t1, out.evaluations);
            heap.push_back({s, t0, t1, est.value, est.error});
        }
    }
    std::make_heap(heap.begin(), heap.end());
    resum();

    int subdivisions = 0;
    while (!heap.empty()) {
        if (!(total_err > tol(total))) {
            resum();
            if (!(total_err > tol(total))) break;
        }
        if (subdivisions >= spec.max_subdivisions) break;
        std::pop_heap(heap.begin(), heap.end());
        const Panel p = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (p.t0 + p.t1);
        if (!(mid > p.t0 && mid < p.t1)) {
            frozen.push_back(p);
            continue;
        }
        const auto left = kronrod15(g, segments[p.segment], p.t0, mid, out.evaluations);
        const auto right = kronrod15(g, segments[p.segment], mid, p.t1, out.evaluations);
        total += left.value + right.value - p.value;
        total_err += left.error + right.error - p.error;
        heap.push_back({p.segment, p.t0, mid, left.value, left.error});
        std::push_heap(heap.begin(), heap.end());
        heap.push_back({p.segment, mid, p.t1, right.value, right.error});
        std::push_heap(heap.begin(), heap.end());
        ++subdivisions;
    }

    resum();
    out.value = total;
    out.error = total_err;
    out.converged = total_err <= tol(total);
    return out;
}

class NestedIntegrator {
 public:
    NestedIntegrator(const Integrand& f, const SupportRegion& region, const QuadSpec& spec,
                     const Breakpoints& breakpoints)
        : f_(f), spec_(spec), point_(region.dim()) {
        for (std::size_t axis = 0; axis < region.dim(); ++axis) {
            const std::vector<double>* cuts = axis < breakpoints.size() ? &breakpoints[axis] : nullptr;
            segments_.push_back(axis_segments(region.lower(axis), region.upper(axis), cuts,
                                              spec.unbounded_transform));
        }
    }

    QuadResult run() {
        QuadResult r = integrate_from(0, spec_.rel_tol, spec_.abs_tol);
        r.evaluations = evaluations_;
        r.converged = r.converged && inner_converged_;
        return r;
    }

 private:
    QuadResult integrate_from(std::size_t axis, double rel_tol, double abs_tol) {
        const bool last = axis + 1 == point_.size();
        auto g = [&](double x) {
            point_[axis] = x;
            if (last) {
                ++evaluations_;
                return f_(std::span<const double>(point_));
            }
            // Inner integrals run tighter so that their noise does not
            // dominate the outer error estimate.
            const auto inner = integrate_from(axis + 1, std::max(rel_tol * 0.1, 1e-15), abs_tol * 0.1);
            if (!inner.converged) inner_converged_ = false;
            return inner.value;
        };
        QuadResult r = integrate_axis(g, segments_[axis], spec_, rel_tol, abs_tol);
        return r;
    }

    const Integrand& f_;
    QuadSpec spec_;
    std::vector<std::vector<Segment>> segments_;
    std::vector<double> point_;
    std::size_t evaluations_ = 0;
    bool inner_converged_ = true;
};

constexpr int kProbePerSegment = 12;

struct ShiftTooSmall {
    double observed;
};

}  // namespace

QuadResult integrate(const Integrand& f, const SupportRegion& region, const QuadSpec& spec,
                     const Breakpoints& breakpoints) {
    spec.validate();
    if (region.dim() > 3) {
        throw std::invalid_argument(
            "integrate: tensor-product quadrature supports at most 3 dimensions; use Monte Carlo "
            "estimators for higher-dimensional parameters");
    }
    NestedIntegrator integrator(f, region, spec, breakpoints);
    return integrator.run();
}

Breakpoints merge_breakpoints(const Breakpoints& a, const Breakpoints& b) {
    Breakpoints out(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i < a.size()) out[i].insert(out[i].end(), a[i].begin(), a[i].end());
        if (i < b.size()) out[i].insert(out[i].end(), b[i].begin(), b[i].end());
    }
    return out;
}

LogQuadResult log_integrate(const Integrand& log_f, const SupportRegion& region,
                            const QuadSpec& spec, const Breakpoints& breakpoints) {
    spec.validate();
    const std::size_t dim = region.dim();
    if (dim > 3) {
        throw std::invalid_argument("log_integrate: at most 3 dimensions supported");
    }

    // Probe coordinates per axis: interior points of every segment plus the
    // finite breakpoints themselves.
    std::vector<std::vector<double>> probes(dim);
    for (std::size_t axis = 0; axis < dim; ++axis) {
        const std::vector<double>* cuts = axis < breakpoints.size() ? &breakpoints[axis] : nullptr;
        for (const auto& seg : axis_segments(region.lower(axis), region.upper(axis), cuts,
                                             spec.unbounded_transform)) {
            for (int k = 0; k < kProbePerSegment; ++k) {
                double jac = 0.0;
                probes[axis].push_back(seg.map((k + 0.5) / kProbePerSegment, jac));
            }
            if (std::isfinite(seg.hi) && seg.hi < region.upper(axis)) probes[axis].push_back(seg.hi);
        }
        std::sort(probes[axis].begin(), probes[axis].end());
    }

    LogQuadResult out;
    std::vector<double> x(dim), best(dim);
    std::vector<std::size_t> idx(dim, 0);
    double best_val = -kInf;
    auto eval = [&](std::span<const double> pt) {
        const double v = log_f(pt);
        ++out.evaluations;
        if (std::isnan(v)) {
            throw NumericalError("integrand", "log_integrate: log integrand returned NaN");
        }
        return v;
    };
    for (;;) {
        for (std::size_t a = 0; a < dim; ++a) x[a] = probes[a][idx[a]];
        const double v = eval(x);
        if (v > best_val) {
            best_val = v;
            best = x;
        }
        std::size_t a = 0;
        while (a < dim && ++idx[a] == probes[a].size()) idx[a++] = 0;
        if (a == dim) break;
    }
    if (best_val == -kInf) {
        out.log_value = -kInf;
        return out;
    }
    if (best_val == kInf) {
        throw NumericalError("integrand", "log_integrate: log integrand is +inf");
    }

    // Coordinate-wise Brent refinement of the maximum within the neighbouring
    // probe cells.
    for (int sweep = 0; sweep < 3; ++sweep) {
        for (std::size_t a = 0; a < dim; ++a) {
            const auto& pa = probes[a];
            const auto it = std::lower_bound(pa.begin(), pa.end(), best[a]);
            const std::size_t pos = static_cast<std::size_t>(it - pa.begin());
            const double lo = pos > 0 ? pa[pos - 1] : best[a];
            double hi = best[a];
            if (pos < pa.size() && pa[pos] > best[a]) {
                hi = pa[pos];
            } else if (pos + 1 < pa.size()) {
                hi = pa[pos + 1];
            }
            if (!(lo < hi)) continue;
            std::vector<double> trial = best;
            auto neg = [&](double t) {
                trial[a] = t;
                const double v = eval(trial);
                return v == -kInf ? std::numeric_limits<double>::max() : -v;
            };
            const auto [t_opt, neg_opt] = boost::math::tools::brent_find_minima(neg, lo, hi, 40);
            if (-neg_opt > best_val) {
                best_val = -neg_opt;
                best[a] = t_opt;
            }
        }
    }
    out.argmax = best;

    Breakpoints cuts = breakpoints;
    cuts.resize(std::max(cuts.size(), dim));
    for (std::size_t a = 0; a < dim; ++a) cuts[a].push_back(best[a]);

    double shift = best_val;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Integrand shifted = [&](std::span<const double> pt) {
            const double v = log_f(pt);
            if (std::isnan(v)) {
                throw NumericalError("integrand", "log_integrate: log integrand returned NaN");
            }
            if (v - shift > 600.0) throw ShiftTooSmall{v};
            return v == -kInf ? 0.0 : std::exp(v - shift);
        };
        try {
            // The shift makes any absolute tolerance arbitrary; the integrand
            // is nonnegative so a purely relative criterion is well posed.
            QuadSpec relative = spec;
            relative.abs_tol = 0.0;
            const QuadResult r = integrate(shifted, region, relative, cuts);
            out.evaluations += r.evaluations;
            out.converged = r.converged;
            if (r.value <= 0.0) {
                out.log_value = -kInf;
                out.rel_error = 0.0;
            } else {
                out.log_value = std::log(r.value) + shift;
                out.rel_error = r.error / r.value;
            }
            return out;
        } catch (const ShiftTooSmall& s) {
            shift = s.observed;
        }
    }
    throw NumericalError("integrand", "log_integrate: could not stabilise the max shift");
}

}  // namespace bayesgeom
