#pragma once

#include <cstddef>
#include <functional>

namespace ahi::quadrature {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-9;
  // Accept when the error estimate is below rel_tol * |value| even if
  // abs_tol is not met. Zero disables the relative criterion.
  double rel_tol = 0.0;
  std::size_t max_evaluations = 1'000'000;
};

using Integrand = std::function<double(double)>;
using Integrand2 = std::function<double(double, double)>;

inline constexpr double kDefaultAbsTol1D = 1e-9;
inline constexpr double kDefaultAbsTol2D = 1e-7;

/// Globally adaptive 15-point Gauss-Kronrod on a finite interval [lo, hi].
QuadratureResult integrate_interval(const Integrand& f, double lo, double hi,
                                    const QuadratureOptions& options = {});

/// \int_lower^inf f(x) dx, via x = lower + u / (1 - u) on [0, 1).
/// Throws ConvergenceError carrying the best estimate when the evaluation
/// budget runs out before the tolerance is met.
QuadratureResult integrate_semi_infinite(const Integrand& f, double lower,
                                         double abs_tol = kDefaultAbsTol1D);
QuadratureResult integrate_semi_infinite(const Integrand& f, double lower,
                                         const QuadratureOptions& options);

/// \int_0^inf \int_0^inf f(s, t) ds dt as an iterated integral: the outer
/// integral over t calls an inner adaptive integral over s. The inner
/// integrals run at a relative tolerance derived from abs_tol, so the
/// integrand should be scaled such that the double integral is O(1).
/// f(s, t) is called with s first.
QuadratureResult integrate_double_semi_infinite(
    const Integrand2& f, double abs_tol = kDefaultAbsTol2D);
QuadratureResult integrate_double_semi_infinite(
    const Integrand2& f, const QuadratureOptions& options);

}  // namespace ahi::quadrature
