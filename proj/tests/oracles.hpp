#pragma once

// Reference computations used only by the tests. They avoid the library's
// quadrature engine so agreement is a genuine cross-check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>

namespace oracle {

inline double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

/// log of \int_a^b exp(logf), shifted by a grid maximum.
inline double log_gk(const std::function<double(double)>& logf, double a, double b, int grid = 400) {
    double shift = -INFINITY;
    for (int i = 1; i < grid; ++i) shift = std::max(shift, logf(a + (b - a) * i / grid));
    const double v = gk([&](double x) { return std::exp(logf(x) - shift); }, a, b);
    return shift + std::log(v);
}

inline double beta_fn(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

/// Differential entropy of Beta(a, b) via digamma.
inline double beta_entropy(double a, double b) {
    using boost::math::digamma;
    return std::log(beta_fn(a, b)) - (a - 1) * digamma(a) - (b - 1) * digamma(b) + (a + b - 2) * digamma(a + b);
}

/// Gaussian-prior regression geometry. beta ~ N(0, lambda^2 I) independent of
/// sigma ~ Unif(0, 2); the beta integrals are Gaussian and done exactly, the
/// sigma integral by Gauss-Kronrod.
struct GaussianRegression {
    Eigen::MatrixXd A;     // X'X
    Eigen::VectorXd bhat;  // least squares
    double rss0;
    double n;
    double lambda_sq;

    GaussianRegression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lam)
        : A(X.transpose() * X), n(static_cast<double>(X.rows())), lambda_sq(lam) {
        bhat = A.ldlt().solve(X.transpose() * y);
        rss0 = (y - X * bhat).squaredNorm();
    }

    // log \int g(beta)^k ell(beta, sigma)^j d beta
    double log_inner(double sigma, int k, int j) const {
        const auto p = static_cast<double>(A.rows());
        const double s2 = sigma * sigma;
        Eigen::MatrixXd P = (j / s2) * A;
        P.diagonal().array() += k / lambda_sq;
        const Eigen::VectorXd h = (j / s2) * (A * bhat);
        const Eigen::LLT<Eigen::MatrixXd> llt(P);
        const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        const double two_pi = 2.0 * std::numbers::pi;
        return -0.5 * p * k * std::log(two_pi * lambda_sq) - 0.5 * n * j * std::log(two_pi * s2) -
               j * (rss0 + bhat.dot(A * bhat)) / (2.0 * s2) + 0.5 * p * std::log(two_pi) - 0.5 * logdet +
               0.5 * h.dot(llt.solve(h));
    }

    // log \int_0^2 u^m \int g^k ell^j, with u = 1/2.
    double log_term(int m, int k, int j) const {
        return m * std::log(0.5) + log_gk([&](double s) { return log_inner(s, k, j); }, 1e-6, 2.0, 2000);
    }

    double log_norm_prior() const {
        const auto p = static_cast<double>(A.rows());
        return 0.5 * (-0.5 * p * std::log(4.0 * std::numbers::pi * lambda_sq) + std::log(0.5));
    }
    double log_norm_lik_local() const { return 0.5 * log_term(0, 0, 2); }

    double kappa_pi_lik() const { return std::exp(log_term(1, 1, 1) - log_norm_prior() - log_norm_lik_local()); }
    double kappa_pi_p() const {
        return std::exp(log_term(2, 2, 1) - log_norm_prior() - 0.5 * log_term(2, 2, 2));
    }
    double kappa_lik_p() const {
        return std::exp(log_term(1, 1, 2) - log_norm_lik_local() - 0.5 * log_term(2, 2, 2));
    }
};

/// kappa between N(c, lambda^2) and Laplace(0, b), b^2 = lambda^2/2, in one
/// dimension. Products of such factors give the p-dimensional value.
inline double kappa_gauss_laplace_1d(double c, double lambda_sq) {
    const double s = std::sqrt(lambda_sq);
    const double b = std::sqrt(0.5 * lambda_sq);
    const double pi = std::numbers::pi;
    auto nd = [&](double x) { return std::exp(-0.5 * (x - c) * (x - c) / lambda_sq) / (s * std::sqrt(2 * pi)); };
    auto ld = [&](double x) { return std::exp(-std::abs(x) / b) / (2 * b); };
    const double lo = std::min(c, 0.0) - 40 * s;
    const double hi = std::max(c, 0.0) + 40 * s;
    double inner = gk([&](double x) { return nd(x) * ld(x); }, lo, 0.0) +
                   gk([&](double x) { return nd(x) * ld(x); }, 0.0, hi);
    const double n1 = 1.0 / std::sqrt(2 * s * std::sqrt(pi));  // (4 pi lambda^2)^{-1/4}
    const double n2 = std::sqrt(1.0 / (4 * b));
    return inner / (n1 * n2);
}

}  // namespace oracle
