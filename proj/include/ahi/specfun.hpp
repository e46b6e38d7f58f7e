#pragma once

// Scalar special functions used by the closed forms: log-scaled modified
// Bessel function of the second kind, the generalized upper incomplete gamma
// function, and log-gamma.
//
// All functions are pure and safe to call concurrently.

namespace ahi::specfun {

/// ln K_order(arg) for real order and arg > 0.
///
/// Evaluated from K_v(z) = \int_0^inf exp(-z cosh t) cosh(v t) dt with a
/// trapezoidal rule centred on the peak of the integrand. The rule is
/// exponentially convergent for this entire integrand, and the whole
/// computation stays in log scale, so orders up to a few hundred and
/// arguments from 1e-8 to 1e4 stay finite.
/// Throws DomainError for arg <= 0 or non-finite inputs.
double log_bessel_k(double order, double arg);

/// K_order(arg) in linear scale. May underflow or overflow.
double bessel_k(double order, double arg);

/// K_p^2(z) / (K_{p+1}(z) K_{p-1}(z)), always in (0, 1).
double bessel_k_triple_ratio(double order, double arg);

/// ln Gamma(a, x) = ln \int_x^inf t^{a-1} e^{-t} dt for any real a and x > 0.
double log_upper_incomplete_gamma(double a, double x);

/// Gamma(a, x) in linear scale.
double upper_incomplete_gamma(double a, double x);

/// ln Gamma(a), a > 0.
double log_gamma(double a);

/// ln Gamma(1 + a), accurate near a = 0. Requires a > -1.
double log_gamma1p(double a);

/// Digamma function psi(a), a > 0.
double digamma(double a);

/// Standard normal quantile, 0 < p < 1.
double normal_quantile(double p);

}  // namespace ahi::specfun
