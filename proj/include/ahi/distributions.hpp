#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ahi/random.hpp"

namespace ahi {

/// GIG(p, a, b): density proportional to x^{p-1} exp(-a x - b / x).
struct GigParams {
  double p;
  double a;
  double b;
};

/// Inverse Gaussian with mean mu and shape lambda.
struct IgParams {
  double mu;
  double lambda;
};

/// Gamma with shape alpha and rate beta.
struct GammaParams {
  double alpha;
  double beta;
};

enum class Family { gig, inverse_gaussian, gamma };

/// One member of the GIG family or its IG / Gamma specializations.
class DistributionSpec {
 public:
  using Params = std::variant<GigParams, IgParams, GammaParams>;

  // Throws DomainError unless every scale/shape parameter is finite and > 0.
  static DistributionSpec gig(double p, double a, double b);
  static DistributionSpec inverse_gaussian(double mu, double lambda);
  static DistributionSpec gamma(double alpha, double beta);

  Family family() const noexcept;
  const Params& params() const noexcept { return params_; }

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&params_);
  }

  /// "gig", "ig" or "gamma".
  std::string family_name() const;
  /// "mu=1;lambda=1" style parameter listing, 10 significant digits.
  std::string params_string() const;
  /// "ig(mu=1, lambda=1)".
  std::string label() const;

  friend bool operator==(const DistributionSpec&, const DistributionSpec&);

 private:
  explicit DistributionSpec(Params params) : params_(params) {}
  Params params_;
};

/// GIG coordinates of a spec. Gamma has no finite GIG image; it is the
/// limit b -> 0+ with p = alpha, a = beta, flagged by `b_limit`.
struct GigEmbedding {
  double p;
  double a;
  double b;  // 0 when b_limit
  bool b_limit;
};

GigEmbedding as_gig(const DistributionSpec& spec);

/// Moments feeding the delta-method variance and the bias expansion.
struct MomentSet {
  double mu;       // E[X]
  double nu;       // E[1/X]
  double var_x;    // Var(X)
  double var_inv;  // Var(1/X)
  double cov;      // Cov(X, 1/X) = 1 - mu * nu
};

/// Validated observations: every value positive and finite, n >= 1.
class Sample {
 public:
  // Throws DomainError on an empty vector or any non-positive/non-finite
  // value, naming the first offending index.
  explicit Sample(std::vector<double> values,
                  std::optional<std::string> source = std::nullopt);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t n() const noexcept { return values_.size(); }
  const std::optional<std::string>& source() const noexcept { return source_; }

  /// Copy with every value multiplied by c > 0.
  Sample scaled(double c) const;

 private:
  std::vector<double> values_;
  std::optional<std::string> source_;
};

double log_pdf(const DistributionSpec& spec, double x);
double pdf(const DistributionSpec& spec, double x);

/// E[X^r]. Throws MomentExistenceError when the moment is infinite.
double moment(const DistributionSpec& spec, double r);

/// Throws MomentExistenceError for Gamma with alpha <= 2.
MomentSet moment_set(const DistributionSpec& spec);

/// E[exp(-s X - t / X)] for s, t >= 0.
double joint_laplace(const DistributionSpec& spec, double s, double t);
double log_joint_laplace(const DistributionSpec& spec, double s, double t);

/// Mode of the density.
double mode(const DistributionSpec& spec);

/// One variate using the caller's generator.
double draw(const DistributionSpec& spec, Rng& rng);

/// Fill `out` with i.i.d. variates.
void draw_into(const DistributionSpec& spec, Rng& rng, std::span<double> out);

/// n i.i.d. variates, deterministic in (spec, n, seed).
Sample sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace ahi
