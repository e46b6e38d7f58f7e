#pragma once

#include <cstddef>
#include <span>

#include "ahi/distributions.hpp"

namespace ahi {

struct IndexEstimate {
  double j_hat = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double confidence_level = 0.95;
  // Plug-in bracket / n. E[j_hat] ~ J - bracket / n, so the corrected
  // estimate is j_hat + bias_correction.
  double bias_correction = 0.0;
  std::size_t n = 0;
  // n == 1 or all observations equal; std_error, CI and correction are zero.
  bool degenerate = false;

  double corrected() const noexcept { return j_hat + bias_correction; }
};

struct AsymptoticSummary {
  double sigma_j_sq;
  // The bracket B in E[j_hat] = J - B / n + o(1/n), signed.
  double first_order_bias;
};

/// J = 1 - 1 / (E[X] E[1/X]). Throws IndexUndefinedError for Gamma with
/// alpha <= 1.
double population_index(const DistributionSpec& spec);

/// A(eps) = 1 - M_{1-eps} / E[X] for eps >= 0; eps = 1 uses exp(E[log X]).
/// Throws IndexUndefinedError when E[X^{1-eps}] is infinite.
double population_atkinson(const DistributionSpec& spec, double eps);

/// Plug-in j_hat. `level` is the two-sided Wald confidence level.
IndexEstimate estimate_index(const Sample& sample, double level = 0.95);

/// Plug-in Atkinson index. eps = 2 returns estimate_index(sample).j_hat
/// bit-for-bit.
double estimate_atkinson(const Sample& sample, double eps);

// Unvalidated kernels shared with the simulation engine. `x` must be
// nonempty, positive and finite.
double jhat_kernel(std::span<const double> x) noexcept;
double atkinson_kernel(std::span<const double> x, double eps) noexcept;

/// Delta-method variance of sqrt(n) (j_hat - J).
double asymptotic_variance(const MomentSet& m);

/// Bracket B of the bias expansion from a moment set.
double bias_bracket(const MomentSet& m);

AsymptoticSummary asymptotic_summary(const DistributionSpec& spec);

/// -B / n using the family closed form (IG, Gamma, GIG Bessel ratios).
/// Throws MomentExistenceError for Gamma with alpha <= 2.
double first_order_bias(const DistributionSpec& spec, std::size_t n);

/// -B / n computed from moment_set(spec).
double first_order_bias_generic(const DistributionSpec& spec, std::size_t n);

/// CV^2 / (1 + CV^2).
double cv_link(const MomentSet& m);

}  // namespace ahi
