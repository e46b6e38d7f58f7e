#include "ahi/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "ahi/error.hpp"

namespace ahi::specfun {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Terms of the trapezoidal sum below exp(-kLogCutoff) relative to the peak
// are dropped.
constexpr double kLogCutoff = 46.0;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

// Legendre continued fraction for S(a, x) = Gamma(a, x) e^x x^{-a}.
// Converges for every real a when x > 0; fast once x is not small.
double scaled_gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / (std::fabs(b) < kTiny ? kTiny : b);
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw EvaluationError("incomplete gamma continued fraction did not converge");
}

// E_1(x) e^x for 0 < x < 1 via the convergent power series.
double scaled_e1_small(double x) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double add = -term / k;
    sum += add;
    if (std::fabs(add) < kEps * std::fabs(sum)) break;
  }
  const double e1 = -std::numbers::egamma - std::log(x) + sum;
  return e1 * std::exp(x);
}

// Gamma(a, x) for 0 < a <= 1 and small x, arranged to avoid the
// cancellation between Gamma(a) and gamma(a, x) as a -> 0.
double upper_gamma_small_a(double a, double x) {
  const double lead = std::expm1(log_gamma1p(a)) / a -
                      std::expm1(a * std::log(x)) / a;
  double tail = 0.0;
  double power = 1.0;  // (-1)^{k+1} x^k / k!
  for (int k = 1; k < 300; ++k) {
    power *= (k == 1 ? x : -x / k);
    const double add = power / (a + k);
    tail += add;
    if (std::fabs(add) < kEps * std::fabs(tail)) break;
  }
  return lead + std::pow(x, a) * tail;
}

// Gamma(a, x) for a > 1, x < a + 1: Gamma(a) - gamma(a, x).
double upper_gamma_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < 100000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  const double lower = sum * std::exp(-x + a * std::log(x) - log_gamma(a));
  return std::exp(log_gamma(a)) * (1.0 - lower);
}

// log K via trapezoidal rule on exp(v t - z cosh t) (1 + e^{-2 v t}) / 2.
double log_bessel_k_impl(double v, double z) {
  const double peak = std::asinh(v / z);
  const double curvature = std::hypot(z, v);  // -g''(peak)
  const double h = std::min(0.2, 0.5 / std::sqrt(curvature));
  const double log_peak = v * peak - curvature;

  // g(t) - g(peak), written to avoid cancellation when z is large.
  auto rel_log = [&](double t) {
    return v * (t - peak) -
           2.0 * z * std::sinh(0.5 * (t + peak)) * std::sinh(0.5 * (t - peak));
  };
  auto term = [&](long k) {
    const double t = static_cast<double>(k) * h;
    const double g = rel_log(t);
    const double weight = (k == 0) ? 0.5 : 1.0;
    return std::pair{g, weight * std::exp(g) * 0.5 *
                            (1.0 + std::exp(-2.0 * v * t))};
  };

  const long centre = static_cast<long>(std::floor(peak / h));
  double sum = 0.0;
  for (long k = centre + 1;; ++k) {
    const auto [g, value] = term(k);
    sum += value;
    if (g < -kLogCutoff) break;
  }
  for (long k = centre; k >= 0; --k) {
    const auto [g, value] = term(k);
    sum += value;
    if (g < -kLogCutoff) break;
  }
  return log_peak + std::log(h * sum);
}

// Taylor coefficients zeta(k) for ln Gamma(1 + a).
const std::array<double, 30>& zeta_table() {
  static const std::array<double, 30> table = [] {
    std::array<double, 30> z{};
    for (int k = 2; k < 30; ++k) {
      double s = 0.0;
      // Tail of sum n^{-k} beyond N is below N^{1-k}/(k-1); N = 2000 is enough
      // for k >= 6, the first few are known exactly.
      for (int n = 2000; n >= 1; --n) s += std::pow(static_cast<double>(n), -k);
      z[k] = s;
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    z[2] = pi2 / 6.0;
    z[3] = 1.2020569031595942854;
    z[4] = pi2 * pi2 / 90.0;
    z[5] = 1.0369277551433699263;
    return z;
  }();
  return table;
}

}  // namespace

double log_bessel_k(double order, double arg) {
  require_finite(order, "Bessel order");
  require_finite(arg, "Bessel argument");
  if (!(arg > 0.0)) {
    throw DomainError("Bessel K argument must be positive, got " +
                      std::to_string(arg));
  }
  return log_bessel_k_impl(std::fabs(order), arg);
}

double bessel_k(double order, double arg) {
  return std::exp(log_bessel_k(order, arg));
}

double bessel_k_triple_ratio(double order, double arg) {
  const double lk = log_bessel_k(order, arg);
  const double lk_up = log_bessel_k(order + 1.0, arg);
  const double lk_down = log_bessel_k(order - 1.0, arg);
  return std::exp(2.0 * lk - lk_up - lk_down);
}

double log_upper_incomplete_gamma(double a, double x) {
  require_finite(a, "incomplete gamma parameter");
  require_finite(x, "incomplete gamma argument");
  if (!(x > 0.0)) {
    throw DomainError("upper incomplete gamma requires x > 0, got " +
                      std::to_string(x));
  }
  const double log_x = std::log(x);

  if (a > 0.0) {
    if (x >= a + 1.0) return std::log(scaled_gamma_cf(a, x)) + a * log_x - x;
    if (a <= 1.0) return std::log(upper_gamma_small_a(a, x));
    if (a > 170.0) {
      throw DomainError("upper incomplete gamma series limited to a <= 170");
    }
    return std::log(upper_gamma_series(a, x));
  }

  if (x >= 1.0) return std::log(scaled_gamma_cf(a, x)) + a * log_x - x;

  // x < 1, a <= 0: downward recurrence on S(a) = Gamma(a,x) e^x x^{-a},
  //   S(a) = (x S(a+1) - 1) / a,
  // seeded at a0 in [0, 1).
  const double base = std::floor(a);
  double a0 = a - base;
  double s;
  if (a0 == 0.0) {
    s = scaled_e1_small(x);
  } else {
    s = upper_gamma_small_a(a0, x) * std::exp(x - a0 * log_x);
  }
  const long steps = static_cast<long>(a0 - a + 0.5);
  for (long i = 0; i < steps; ++i) {
    a0 -= 1.0;
    s = (x * s - 1.0) / a0;
  }
  return std::log(s) + a * log_x - x;
}

double upper_incomplete_gamma(double a, double x) {
  return std::exp(log_upper_incomplete_gamma(a, x));
}

double log_gamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("log_gamma requires a > 0, got " + std::to_string(a));
  }
  int sign = 1;
  return ::lgamma_r(a, &sign);
}

double log_gamma1p(double a) {
  if (!(a > -1.0) || !std::isfinite(a)) {
    throw DomainError("log_gamma1p requires a > -1");
  }
  if (std::fabs(a) >= 0.2) return log_gamma(1.0 + a);
  const auto& zeta = zeta_table();
  double sum = -std::numbers::egamma * a;
  double power = -a;  // (-a)^k
  for (int k = 2; k < 30; ++k) {
    power *= -a;
    sum += zeta[k] * power / k;
  }
  return sum;
}

double digamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("digamma requires a > 0");
  }
  return boost::math::digamma(a);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal quantile requires 0 < p < 1");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

}  // namespace ahi::specfun
