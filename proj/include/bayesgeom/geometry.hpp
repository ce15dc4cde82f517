#pragma once

#include <functional>
#include <span>
#include <string>

#include "bayesgeom/numerics.hpp"

namespace bayesgeom {

enum class FieldKind { prior, likelihood, posterior, generic };

using LogFunction = std::function<double(std::span<const double>)>;

/// A nonnegative function on a box, stored through its logarithm.
///
/// The field is zero outside `support()`; eval_log returns -inf there without
/// calling the user function. Fields are immutable and may be shared across
/// threads as long as the wrapped function is pure.
class ScalarField {
 public:
    /// Checks square-integrability with a loose quadrature probe and throws
    /// NotSquareIntegrable when the integral of exp(2 log f) diverges.
    ScalarField(LogFunction eval_log, SupportRegion support, FieldKind kind = FieldKind::generic,
                Breakpoints breakpoints = {});

    /// Same, without the L2 probe. For likelihoods that are only
    /// square-integrable on a prior's support (see local_compatibility).
    static ScalarField unchecked(LogFunction eval_log, SupportRegion support,
                                 FieldKind kind = FieldKind::generic, Breakpoints breakpoints = {});

    double eval_log(std::span<const double> theta) const;
    double operator()(std::span<const double> theta) const;

    const SupportRegion& support() const noexcept { return support_; }
    FieldKind kind() const noexcept { return kind_; }
    /// Hints for the integrator (modes, kinks); merged when fields combine.
    const Breakpoints& breakpoints() const noexcept { return breakpoints_; }
    std::size_t dim() const noexcept { return support_.dim(); }

    /// c * f, for c > 0.
    ScalarField scaled(double c) const;
    /// Pointwise square root.
    ScalarField sqrt() const;
    /// Pointwise product (posterior kernel from prior and likelihood).
    ScalarField times(const ScalarField& other, FieldKind kind) const;

 private:
    struct Unchecked {};
    ScalarField(Unchecked, LogFunction eval_log, SupportRegion support, FieldKind kind,
                Breakpoints breakpoints);

    LogFunction eval_log_;
    SupportRegion support_;
    FieldKind kind_;
    Breakpoints breakpoints_;
};

struct GeomSummary {
    double norm_g = 0.0;
    double norm_h = 0.0;
    double inner = 0.0;
    /// Clamped to [0,1].
    double kappa = 0.0;
    /// Unclamped value, before quadrature jitter is removed.
    double kappa_raw = 0.0;
    double angle_deg = 90.0;
};

/// ln <g, h>, integrating over the intersection of supports. -inf when the
/// supports are disjoint or the product vanishes.
double log_inner_product(const ScalarField& g, const ScalarField& h, const QuadSpec& spec = {});
double inner_product(const ScalarField& g, const ScalarField& h, const QuadSpec& spec = {});

/// ln ||g||^2.
double log_norm_sq(const ScalarField& g, const QuadSpec& spec = {});
double norm(const ScalarField& g, const QuadSpec& spec = {});

/// kappa = <g,h> / (||g|| ||h||) and the matching angle in degrees.
/// Throws std::domain_error for a zero-norm input.
GeomSummary compatibility(const ScalarField& g, const ScalarField& h, const QuadSpec& spec = {});

/// Local prior-likelihood compatibility: the likelihood norm is taken over the
/// prior's support only, so ell may fail to be square-integrable elsewhere.
/// Throws NotSquareIntegrable when the restricted norm diverges.
double local_compatibility(const ScalarField& pi, const ScalarField& ell, const QuadSpec& spec = {});

/// Compatibility of the pointwise square roots; the Hellinger affinity when
/// g and h are probability densities.
double affine_compatibility(const ScalarField& g, const ScalarField& h, const QuadSpec& spec = {});

struct PythagorasCheck {
    double norm_sq = 0.0;          // ||pi||^2
    double distance_sq = 0.0;      // ||pi - pi0||^2
    double uniform_norm_sq = 0.0;  // ||pi0||^2
    double decomposition = 0.0;    // distance_sq + uniform_norm_sq
    double residual = 0.0;         // |norm_sq - decomposition|
};

/// ||pi||^2 against ||pi - pi0||^2 + ||pi0||^2, pi0 the uniform density on a
/// bounded region containing pi's support.
PythagorasCheck pythagoras_check(const ScalarField& pi, const SupportRegion& region,
                                 const QuadSpec& spec = {});

/// Differential entropy -int pi log pi (integrand 0 where pi = 0).
double entropy_functional(const ScalarField& pi, const QuadSpec& spec = {});

std::string to_string(FieldKind kind);

}  // namespace bayesgeom
