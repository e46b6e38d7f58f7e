#include "ahi/exact_expectation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "ahi/error.hpp"
#include "ahi/format.hpp"
#include "ahi/indices.hpp"
#include "ahi/quadrature.hpp"
#include "ahi/specfun.hpp"

namespace ahi {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LogIntegral {
  double log_value;
  double rel_error;
};

// ln \int_lower^inf exp(log_f(x)) dx for a unimodal integrand. Substitutes
// x = lower + e^v, locates the peak in v and integrates the normalised
// integrand outward from it on both sides.
LogIntegral integrate_log_peaked(const std::function<double(double)>& log_f, double lower,
                                 double rel_tol) {
  auto g = [&](double v) {
    const double x = lower + std::exp(v);
    if (x == lower || !std::isfinite(x)) return kNegInf;
    return log_f(x) + v;
  };

  double best_v = 0.0;
  double best = kNegInf;
  for (double v = -50.0; v <= 12.0; v += 0.25) {
    const double val = g(v);
    if (val > best) {
      best = val;
      best_v = v;
    }
  }
  if (!std::isfinite(best)) throw EvaluationError("integrand has no finite values");

  // golden-section refinement of the peak
  double lo = best_v - 0.25, hi = best_v + 0.25;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - ratio * (hi - lo), d = lo + ratio * (hi - lo);
  double gc = g(c), gd = g(d);
  for (int i = 0; i < 60 && hi - lo > 1e-10; ++i) {
    if (gc > gd) {
      hi = d;
      d = c;
      gd = gc;
      c = hi - ratio * (hi - lo);
      gc = g(c);
    } else {
      lo = c;
      c = d;
      gc = gd;
      d = lo + ratio * (hi - lo);
      gd = g(d);
    }
  }
  const double peak_v = 0.5 * (lo + hi);
  const double peak = std::max(g(peak_v), best);

  quadrature::QuadratureOptions opts;
  opts.abs_tol = std::numeric_limits<double>::min();
  opts.rel_tol = rel_tol;
  const auto right = quadrature::integrate_semi_infinite(
      [&](double w) { return std::exp(g(peak_v + w) - peak); }, 0.0, opts);
  const auto left = quadrature::integrate_semi_infinite(
      [&](double w) { return std::exp(g(peak_v - w) - peak); }, 0.0, opts);
  const double total = right.value + left.value;
  return {peak + std::log(total), (right.abs_error_estimate + left.abs_error_estimate) / total};
}

void require_n(std::size_t n) {
  if (n == 0) throw DomainError("sample size must be at least 1");
}

}  // namespace

std::string method_name(ExactMethod method) {
  switch (method) {
    case ExactMethod::generic_double_integral:
      return "generic_double_integral";
    case ExactMethod::gig_single_integral:
      return "gig_single_integral";
    case ExactMethod::ig_closed_form:
      return "ig_closed_form";
    case ExactMethod::gamma_single_integral:
      return "gamma_single_integral";
  }
  return "";
}

// n^2 \iint L^n ds dt with s = u / (n mu), t = w / (n nu), which makes the
// rescaled integrand close to exp(-u - w) for large n.
double generic_integral_term(const DistributionSpec& spec, std::size_t n, double abs_tol) {
  require_n(n);
  const double mu = moment(spec, 1.0);
  const double nu = moment(spec, -1.0);
  const double nd = static_cast<double>(n);
  const auto r = quadrature::integrate_double_semi_infinite(
      [&](double u, double w) {
        return std::exp(nd * log_joint_laplace(spec, u / (nd * mu), w / (nd * nu)));
      },
      abs_tol);
  return r.value / (mu * nu);
}

ExactExpectation expected_jhat_generic(const DistributionSpec& spec, std::size_t n,
                                       double abs_tol) {
  require_n(n);
  ExactExpectation out;
  out.method = ExactMethod::generic_double_integral;
  if (n == 1) return out;
  out.value = 1.0 - generic_integral_term(spec, n, abs_tol);
  out.error_estimate = abs_tol;
  return out;
}

double gig_integral_term(double p, double a, double b, std::size_t n, double abs_tol) {
  require_n(n);
  // validates a, b
  (void)DistributionSpec::gig(p, a, b);
  const double nd = static_cast<double>(n);
  const double np = nd * p;
  if (np == 0.0) {
    throw UnsupportedCaseError("GIG single integral requires n p != 0; use the generic route");
  }
  const double root_ab = std::sqrt(a * b);
  const double log_ab = std::log(a * b);
  const double log_prefactor = std::log(2.0 * nd) + 0.5 * np * (std::log(a) - std::log(b)) -
                               std::log(std::fabs(p)) -
                               nd * specfun::log_bessel_k(p, 2.0 * root_ab);
  const double abs_np = std::fabs(np);

  // (x/a)^{np} - (b/x)^{np} has the sign of p for x > sqrt(ab), as does the
  // prefactor, so the product is positive.
  auto log_f = [&](double x) {
    const double lx = std::log(x);
    const double gap = abs_np * (2.0 * lx - log_ab);
    if (!(gap > 0.0)) return kNegInf;
    const double log_big = std::max(np * (lx - std::log(a)), np * (std::log(b) - lx));
    return log_prefactor + lx + nd * specfun::log_bessel_k(p, 2.0 * x) + log_big +
           std::log(-std::expm1(-gap));
  };
  const auto r = integrate_log_peaked(log_f, root_ab, std::max(abs_tol * 1e-2, 1e-14));
  return std::exp(r.log_value);
}

ExactExpectation expected_jhat_gig(double p, double a, double b, std::size_t n, double abs_tol) {
  require_n(n);
  (void)DistributionSpec::gig(p, a, b);
  if (static_cast<double>(n) * p == 0.0) {
    throw UnsupportedCaseError("GIG single integral requires n p != 0; use the generic route");
  }
  ExactExpectation out;
  out.method = ExactMethod::gig_single_integral;
  if (n == 1) return out;
  const double term = gig_integral_term(p, a, b, n, abs_tol);
  out.value = 1.0 - term;
  out.error_estimate = std::max(abs_tol * 1e-2, 1e-14) * term;
  return out;
}

ExactExpectation expected_jhat_ig(double mu, double lambda, std::size_t n) {
  require_n(n);
  (void)DistributionSpec::inverse_gaussian(mu, lambda);
  ExactExpectation out;
  out.method = ExactMethod::ig_closed_form;
  if (n == 1) return out;

  // E = 1 - 1/n - lambda/mu + T, where the Gamma(2, x) term has been
  // simplified and T carries Gamma(2 - n, x) with x = n lambda / mu. The
  // e^{x} factor cancels against the scaled incomplete gamma
  // S(a, x) = Gamma(a, x) e^{x} x^{-a}.
  const double nd = static_cast<double>(n);
  const double x = nd * lambda / mu;
  const double a = 2.0 - nd;
  const double ln2 = std::numbers::ln2;
  const double log_s = specfun::log_upper_incomplete_gamma(a, x) + x - a * std::log(x);
  const double log_t = 0.5 * nd * std::log(lambda) + (2.0 - 0.5 * nd) * ln2 + std::log(nd) +
                       0.5 * nd * (std::log(lambda) - ln2 - 2.0 * std::log(mu)) +
                       (nd - 2.0) * std::log(2.0 * nd) + a * std::log(x) + log_s;
  if (!std::isfinite(log_t) || log_t > 700.0) {
    throw EvaluationError("IG closed form overflowed for mu=" + format_number(mu) +
                          ", lambda=" + format_number(lambda) + ", n=" + std::to_string(n));
  }
  const double t = std::exp(log_t);
  const double ratio = lambda / mu;
  out.value = (1.0 - 1.0 / nd - ratio) + t;
  out.error_estimate = 1e-14 * (1.0 + ratio + t);
  return out;
}

double gamma_integral_term(double alpha, std::size_t n, double abs_tol) {
  require_n(n);
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw IndexUndefinedError("E[j_hat] for Gamma requires alpha > 1, got alpha=" +
                              format_number(alpha));
  }
  const double nd = static_cast<double>(n);
  const double log_prefactor = (nd * (1.0 - alpha) - 1.0) * std::numbers::ln2 + std::log(nd) -
                               std::log(alpha) - nd * specfun::log_gamma(alpha);
  auto log_f = [&](double y) {
    return log_prefactor + (1.0 + nd * alpha) * std::log(y) +
           nd * specfun::log_bessel_k(alpha, y);
  };
  const auto r = integrate_log_peaked(log_f, 0.0, std::max(abs_tol * 1e-2, 1e-14));
  return std::exp(r.log_value);
}

ExactExpectation expected_jhat_gamma(double alpha, std::size_t n, double abs_tol) {
  require_n(n);
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw IndexUndefinedError("E[j_hat] for Gamma requires alpha > 1, got alpha=" +
                              format_number(alpha));
  }
  ExactExpectation out;
  out.method = ExactMethod::gamma_single_integral;
  if (n == 1) return out;
  const double term = gamma_integral_term(alpha, n, abs_tol);
  out.value = 1.0 - term;
  out.error_estimate = std::max(abs_tol * 1e-2, 1e-14) * term;
  return out;
}

ExactExpectation expected_jhat(const DistributionSpec& spec, std::size_t n, ExactRoute route) {
  require_n(n);
  if (route == ExactRoute::generic) return expected_jhat_generic(spec, n);
  if (const auto* ig = spec.get_if<IgParams>()) return expected_jhat_ig(ig->mu, ig->lambda, n);
  if (const auto* g = spec.get_if<GammaParams>()) return expected_jhat_gamma(g->alpha, n);
  const auto& g = std::get<GigParams>(spec.params());
  if (g.p == 0.0 && route == ExactRoute::automatic) return expected_jhat_generic(spec, n);
  return expected_jhat_gig(g.p, g.a, g.b, n);
}

double exact_bias(const DistributionSpec& spec, std::size_t n, ExactRoute route) {
  const double j = population_index(spec);
  if (n == 1) {
    require_n(n);
    return -j;
  }
  return expected_jhat(spec, n, route).value - j;
}

}  // namespace ahi
