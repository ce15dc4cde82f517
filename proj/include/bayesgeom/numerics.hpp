#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace bayesgeom {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b).
/// Symmetric by construction: the two single-argument terms are summed in a
/// canonical order, so log_beta(a, b) and log_beta(b, a) are bit-identical.
double log_beta(double a, double b);

/// ln (n choose k) for 0 <= k <= n.
double log_binomial(unsigned n, unsigned k);

/// ln(exp(a) + exp(b)) without overflow; -inf is the identity.
double log_add_exp(double a, double b);

/// ln sum exp(v_i) with max shift. Empty input gives -inf.
double log_sum_exp(std::span<const double> values);

// ---------------------------------------------------------------------------
// Integration domains
// ---------------------------------------------------------------------------

/// Axis-aligned box in R^p; any bound may be infinite.
class SupportRegion {
 public:
    SupportRegion(std::vector<double> lower, std::vector<double> upper);

    static SupportRegion interval(double lower, double upper);
    static SupportRegion real_line();
    static SupportRegion positive_half_line();

    std::size_t dim() const noexcept { return lower_.size(); }
    double lower(std::size_t axis) const { return lower_.at(axis); }
    double upper(std::size_t axis) const { return upper_.at(axis); }
    const std::vector<double>& lower() const noexcept { return lower_; }
    const std::vector<double>& upper() const noexcept { return upper_; }

    bool bounded() const noexcept;
    /// Lebesgue measure; +inf for unbounded boxes.
    double volume() const noexcept;
    /// Open-box membership.
    bool contains(std::span<const double> x) const noexcept;
    /// Intersection, or nullopt when it has empty interior.
    std::optional<SupportRegion> intersect(const SupportRegion& other) const;
    /// Cartesian product (this axes first).
    SupportRegion product(const SupportRegion& other) const;

    bool operator==(const SupportRegion&) const = default;

 private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

enum class UnboundedTransform {
    rational,  // x = a + t/(1-t)
    tangent,   // x = a + tan(pi t / 2)
};

struct QuadSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    UnboundedTransform unbounded_transform = UnboundedTransform::rational;
    /// Equal-width panels each axis segment starts with.
    int initial_panels = 8;

    /// Throws std::invalid_argument on rel_tol <= 0, abs_tol < 0, etc.
    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    std::size_t evaluations = 0;
};

/// Result of integrating exp(log_f): the log of the integral plus the error
/// estimate relative to the integral.
struct LogQuadResult {
    double log_value = -kInf;
    double rel_error = 0.0;
    bool converged = true;
    std::size_t evaluations = 0;
    /// Location of the probed maximum of log_f (empty when log_f == -inf).
    std::vector<double> argmax;
};

using Integrand = std::function<double(std::span<const double>)>;

/// Per-axis interior split points. Axis i of the region is cut at every
/// breakpoints[i][k] that lies strictly inside it. May be shorter than dim().
using Breakpoints = std::vector<std::vector<double>>;

/// Adaptive 7/15-point Gauss-Kronrod integration over a box of dimension
/// <= 3 (iterated rule, axis 0 outermost). Infinite axes are mapped onto
/// (0,1) with `spec.unbounded_transform`; doubly infinite axes are split at 0.
///
/// Panels are bisected in order of decreasing error estimate until the total
/// estimate falls below max(abs_tol, rel_tol*|I|). Running out of
/// subdivisions is not an error: the best estimate comes back with
/// `converged == false`. A NaN from f raises NumericalError.
QuadResult integrate(const Integrand& f, const SupportRegion& region,
                     const QuadSpec& spec = {}, const Breakpoints& breakpoints = {});

/// ln of the integral of exp(log_f) over the region, computed with a max
/// shift: log_f is probed on a grid, the maximum is refined by coordinate
/// search, exp(log_f - max) is integrated with the maximiser added as a
/// breakpoint, and the shift is added back. Returns -inf when log_f is -inf
/// at every probe point.
LogQuadResult log_integrate(const Integrand& log_f, const SupportRegion& region,
                            const QuadSpec& spec = {}, const Breakpoints& breakpoints = {});

/// Concatenate two breakpoint lists axis by axis.
Breakpoints merge_breakpoints(const Breakpoints& a, const Breakpoints& b);

}  // namespace bayesgeom
