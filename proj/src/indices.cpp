#include "ahi/indices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ahi/error.hpp"
#include "ahi/format.hpp"
#include "ahi/specfun.hpp"

namespace ahi {
namespace {

constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

void require_eps(double eps) {
  if (!std::isfinite(eps) || eps < 0.0) {
    throw DomainError("Atkinson eps must be finite and >= 0, got " + format_number(eps));
  }
}

double ln_k(double order, double z) { return specfun::log_bessel_k(order, z); }

// d/dr ln E[X^r] at r = 0 for GIG, i.e. E[log X]. Fourth-order central
// difference of ln K in the order.
double gig_mean_log(const GigEmbedding& g) {
  const double z = 2.0 * std::sqrt(g.a * g.b);
  const double h = 1e-3;
  const double d1 = ln_k(g.p + h, z) - ln_k(g.p - h, z);
  const double d2 = ln_k(g.p + 2 * h, z) - ln_k(g.p - 2 * h, z);
  return 0.5 * (std::log(g.b) - std::log(g.a)) + (8.0 * d1 - d2) / (12.0 * h);
}

}  // namespace

double population_index(const DistributionSpec& spec) {
  if (const auto* ig = spec.get_if<IgParams>()) return ig->mu / (ig->mu + ig->lambda);
  if (const auto* g = spec.get_if<GammaParams>()) {
    if (!(g->alpha > 1.0)) {
      throw IndexUndefinedError("J for Gamma requires alpha > 1 (E[1/X] is infinite), got alpha=" +
                                format_number(g->alpha));
    }
    return 1.0 / g->alpha;
  }
  const auto& g = std::get<GigParams>(spec.params());
  return 1.0 - specfun::bessel_k_triple_ratio(g.p, 2.0 * std::sqrt(g.a * g.b));
}

double population_atkinson(const DistributionSpec& spec, double eps) {
  require_eps(eps);
  if (eps == 0.0) return 0.0;
  if (eps == 2.0) return population_index(spec);

  if (const auto* g = spec.get_if<GammaParams>()) {
    const double mean_ln = std::log(g->alpha) - std::log(g->beta);
    if (eps == 1.0) {
      return -std::expm1(specfun::digamma(g->alpha) - std::log(g->alpha));
    }
    const double r = 1.0 - eps;
    if (!(g->alpha + r > 0.0)) {
      throw IndexUndefinedError("A(eps) for Gamma requires eps < alpha + 1 (alpha=" +
                                format_number(g->alpha) + ", eps=" + format_number(eps) + ")");
    }
    const double ln_moment = specfun::log_gamma(g->alpha + r) - specfun::log_gamma(g->alpha) -
                             r * std::log(g->beta);
    return -std::expm1(ln_moment / r - mean_ln);
  }

  const GigEmbedding g = as_gig(spec);
  const double z = 2.0 * std::sqrt(g.a * g.b);
  const double half_ln_ratio = 0.5 * (std::log(g.b) - std::log(g.a));
  const double ln_mean = half_ln_ratio + ln_k(g.p + 1.0, z) - ln_k(g.p, z);
  if (eps == 1.0) return -std::expm1(gig_mean_log(g) - ln_mean);
  const double r = 1.0 - eps;
  const double ln_moment = r * half_ln_ratio + ln_k(g.p + r, z) - ln_k(g.p, z);
  return -std::expm1(ln_moment / r - ln_mean);
}

double jhat_kernel(std::span<const double> x) noexcept {
  double sum = 0.0;
  double sum_inv = 0.0;
  for (double v : x) {
    sum += v;
    sum_inv += 1.0 / v;
  }
  const double n = static_cast<double>(x.size());
  const double j = 1.0 - 1.0 / ((sum / n) * (sum_inv / n));
  return std::clamp(j, 0.0, kBelowOne);
}

double atkinson_kernel(std::span<const double> x, double eps) noexcept {
  if (eps == 0.0) return 0.0;
  if (eps == 2.0) return jhat_kernel(x);
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;

  double a;
  if (eps == 1.0) {
    double mean_log = 0.0;
    for (double v : x) mean_log += std::log(v / mean);
    a = -std::expm1(mean_log / n);
  } else {
    const double r = 1.0 - eps;
    double acc = 0.0;
    for (double v : x) acc += std::pow(v / mean, r);
    a = -std::expm1(std::log(acc / n) / r);
  }
  return std::clamp(a, 0.0, kBelowOne);
}

IndexEstimate estimate_index(const Sample& sample, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("confidence level must lie in (0, 1), got " + format_number(level));
  }
  const auto x = sample.values();
  IndexEstimate est;
  est.n = sample.n();
  est.confidence_level = level;
  est.j_hat = jhat_kernel(x);

  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (est.n < 2 || *lo == *hi) {
    est.j_hat = 0.0;
    est.degenerate = true;
    return est;
  }

  const double n = static_cast<double>(est.n);
  double mu = 0.0, nu = 0.0;
  for (double v : x) {
    mu += v;
    nu += 1.0 / v;
  }
  mu /= n;
  nu /= n;
  double sxx = 0.0, sii = 0.0, sxi = 0.0;
  for (double v : x) {
    const double dx = v - mu;
    const double di = 1.0 / v - nu;
    sxx += dx * dx;
    sii += di * di;
    sxi += dx * di;
  }
  const MomentSet m{mu, nu, sxx / (n - 1.0), sii / (n - 1.0), sxi / (n - 1.0)};

  const double sigma_sq = std::max(asymptotic_variance(m), 0.0);
  est.std_error = std::sqrt(sigma_sq / n);
  const double z = specfun::normal_quantile(0.5 + 0.5 * level);
  est.ci_low = std::max(0.0, est.j_hat - z * est.std_error);
  est.ci_high = std::min(kBelowOne, est.j_hat + z * est.std_error);
  est.bias_correction = bias_bracket(m) / n;
  return est;
}

double estimate_atkinson(const Sample& sample, double eps) {
  require_eps(eps);
  if (eps == 2.0) return estimate_index(sample).j_hat;
  const auto x = sample.values();
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) return 0.0;
  return atkinson_kernel(x, eps);
}

double asymptotic_variance(const MomentSet& m) {
  const double mu2 = m.mu * m.mu;
  const double nu2 = m.nu * m.nu;
  return m.var_x / (mu2 * mu2 * nu2) + m.var_inv / (mu2 * nu2 * nu2) +
         2.0 * m.cov / (mu2 * m.mu * nu2 * m.nu);
}

double bias_bracket(const MomentSet& m) {
  return m.var_x / (m.mu * m.mu * m.mu * m.nu) + m.var_inv / (m.mu * m.nu * m.nu * m.nu) +
         m.cov / (m.mu * m.mu * m.nu * m.nu);
}

AsymptoticSummary asymptotic_summary(const DistributionSpec& spec) {
  const MomentSet m = moment_set(spec);
  return {asymptotic_variance(m), bias_bracket(m)};
}

double first_order_bias(const DistributionSpec& spec, std::size_t n) {
  if (n == 0) throw DomainError("sample size must be at least 1");
  const double inv_n = 1.0 / static_cast<double>(n);

  if (const auto* ig = spec.get_if<IgParams>()) {
    const double s = ig->mu + ig->lambda;
    return -inv_n * ig->mu * (s * s + ig->mu * ig->lambda) / (s * s * s);
  }
  if (const auto* g = spec.get_if<GammaParams>()) {
    if (!(g->alpha > 2.0)) {
      throw MomentExistenceError("first-order bias for Gamma requires alpha > 2, got alpha=" +
                                 format_number(g->alpha));
    }
    return -inv_n * (g->alpha - 1.0) / (g->alpha * (g->alpha - 2.0));
  }

  const auto& g = std::get<GigParams>(spec.params());
  const double z = 2.0 * std::sqrt(g.a * g.b);
  const double k0 = ln_k(g.p, z);
  const double kp1 = ln_k(g.p + 1.0, z);
  const double km1 = ln_k(g.p - 1.0, z);
  const double kp2 = ln_k(g.p + 2.0, z);
  const double km2 = ln_k(g.p - 2.0, z);
  const double r = std::exp(2.0 * k0 - kp1 - km1);
  const double bracket =
      r * (std::exp(kp2 + k0 - 2.0 * kp1) + std::exp(km2 + k0 - 2.0 * km1) + r - 3.0);
  return -inv_n * bracket;
}

double first_order_bias_generic(const DistributionSpec& spec, std::size_t n) {
  if (n == 0) throw DomainError("sample size must be at least 1");
  return -bias_bracket(moment_set(spec)) / static_cast<double>(n);
}

double cv_link(const MomentSet& m) {
  const double cv2 = m.var_x / (m.mu * m.mu);
  return cv2 / (1.0 + cv2);
}

}  // namespace ahi
