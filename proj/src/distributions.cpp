#include "ahi/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "ahi/error.hpp"
#include "ahi/format.hpp"
#include "ahi/quadrature.hpp"
#include "ahi/specfun.hpp"

namespace ahi {
namespace {

using specfun::log_bessel_k;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw DomainError(std::string(name) + " must be finite and > 0, got " +
                      format_number(v));
  }
}

GigParams ig_to_gig(const IgParams& ig) {
  return {-0.5, ig.lambda / (2.0 * ig.mu * ig.mu), ig.lambda / 2.0};
}

double gig_log_normalizer(const GigParams& g) {
  // ln[(a/b)^{p/2} / (2 K_p(2 sqrt(ab)))]
  return 0.5 * g.p * (std::log(g.a) - std::log(g.b)) - std::numbers::ln2 -
         log_bessel_k(g.p, 2.0 * std::sqrt(g.a * g.b));
}

double gig_log_moment(const GigParams& g, double r) {
  const double omega = 2.0 * std::sqrt(g.a * g.b);
  return 0.5 * r * (std::log(g.b) - std::log(g.a)) +
         log_bessel_k(g.p + r, omega) - log_bessel_k(g.p, omega);
}

double gig_log_laplace(const GigParams& g, double s, double t) {
  const double as = g.a + s;
  const double bt = g.b + t;
  return 0.5 * g.p * (std::log(g.a) - std::log(as)) +
         0.5 * g.p * (std::log(bt) - std::log(g.b)) +
         log_bessel_k(g.p, 2.0 * std::sqrt(as * bt)) -
         log_bessel_k(g.p, 2.0 * std::sqrt(g.a * g.b));
}

// ln E[exp(-sX - t/X)] for Gamma by quadrature, split at the mode of the
// tilted integrand and normalised by its peak value.
double gamma_log_laplace(const GammaParams& g, double s, double t) {
  const double rate = g.beta + s;
  const double shape_m1 = g.alpha - 1.0;
  double peak = 0.0;
  if (t > 0.0 || shape_m1 > 0.0) {
    peak = (shape_m1 + std::sqrt(shape_m1 * shape_m1 + 4.0 * rate * t)) /
           (2.0 * rate);
  }
  auto log_kernel = [&](double x) {
    return shape_m1 * std::log(x) - rate * x - (t > 0.0 ? t / x : 0.0);
  };
  const double log_peak = peak > 0.0 ? log_kernel(peak) : 0.0;
  const quadrature::Integrand f = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(log_kernel(x) - log_peak);
  };

  quadrature::QuadratureOptions opts;
  opts.abs_tol = 1e-300;
  opts.rel_tol = 1e-13;
  double total = quadrature::integrate_semi_infinite(f, peak, opts).value;
  if (peak > 0.0) total += quadrature::integrate_interval(f, 0.0, peak, opts).value;

  const double log_norm = g.alpha * std::log(g.beta) - specfun::log_gamma(g.alpha);
  return std::log(total) + log_peak + log_norm;
}

// --- samplers --------------------------------------------------------------

double gamma_variate(double alpha, double beta, Rng& rng) {
  if (alpha < 1.0) {
    const double boosted = gamma_variate(alpha + 1.0, 1.0, rng);
    return boosted * std::pow(rng.uniform(), 1.0 / alpha) / beta;
  }
  // Marsaglia-Tsang squeeze
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / beta;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / beta;
  }
}

// Michael-Schucany-Haas transformation with multiple roots.
double ig_variate(double mu, double lambda, Rng& rng) {
  const double z = rng.normal();
  const double y = z * z;
  const double my = mu * y;
  // mu + mu^2 y/(2 lambda) - mu/(2 lambda) sqrt(4 mu lambda y + mu^2 y^2),
  // rearranged to avoid cancellation.
  const double x = mu - 2.0 * mu * my / (my + std::sqrt(my * my + 4.0 * mu * lambda * y));
  if (rng.uniform() <= mu / (mu + x)) return x;
  return mu * mu / x;
}

// Sampler for the two-parameter form with density proportional to
// x^{lambda-1} exp(-(omega/2)(x + 1/x)), lambda >= 0.
class StandardGigSampler {
 public:
  StandardGigSampler(double lambda, double omega) : lambda_(lambda), omega_(omega) {
    mode_ = (lambda_ >= 1.0)
                ? ((lambda_ - 1.0) + std::sqrt((lambda_ - 1.0) * (lambda_ - 1.0) +
                                               omega_ * omega_)) / omega_
                : omega_ / ((1.0 - lambda_) +
                            std::sqrt((1.0 - lambda_) * (1.0 - lambda_) +
                                      omega_ * omega_));
    log_g_mode_ = log_g(mode_);

    if (lambda_ > 1.0 || omega_ > 1.0) {
      method_ = Method::shifted_rou;
      setup_shifted();
    } else if (omega_ >= std::min(0.5, 2.0 / 3.0 * std::sqrt(1.0 - lambda_))) {
      method_ = Method::plain_rou;
      const double xp = ((lambda_ + 1.0) + std::sqrt((lambda_ + 1.0) * (lambda_ + 1.0) +
                                                     omega_ * omega_)) / omega_;
      v_plus_ = xp * std::exp(0.5 * (log_g(xp) - log_g_mode_));
    } else {
      method_ = Method::piecewise_hat;
      setup_hat();
    }
  }

  double operator()(Rng& rng) const {
    switch (method_) {
      case Method::shifted_rou:
        for (;;) {
          const double u = rng.uniform();
          const double v = v_minus_ + rng.uniform() * (v_plus_ - v_minus_);
          const double x = v / u + mode_;
          if (x <= 0.0) continue;
          if (2.0 * std::log(u) <= log_g(x) - log_g_mode_) return x;
        }
      case Method::plain_rou:
        for (;;) {
          const double u = rng.uniform();
          const double x = rng.uniform() * v_plus_ / u;
          if (2.0 * std::log(u) <= log_g(x) - log_g_mode_) return x;
        }
      case Method::piecewise_hat:
        return draw_hat(rng);
    }
    return 0.0;
  }

 private:
  enum class Method { shifted_rou, plain_rou, piecewise_hat };

  double log_g(double x) const {
    return (lambda_ - 1.0) * std::log(x) - 0.5 * omega_ * (x + 1.0 / x);
  }

  // Bounding rectangle for the mode-shifted ratio-of-uniforms region. The
  // extremes of (x - m) sqrt(g(x)) solve x^3 + a x^2 + b x + c = 0.
  void setup_shifted() {
    const double m = mode_;
    const double a = -2.0 * (lambda_ + 1.0) / omega_ - m;
    const double b = 2.0 * (lambda_ - 1.0) * m / omega_ - 1.0;
    const double c = m;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double phi = std::acos(std::clamp(-0.5 * q * std::sqrt(-27.0 / (p * p * p)), -1.0, 1.0));
    const double r = std::sqrt(-4.0 * p / 3.0);
    const double x_minus =
        r * std::cos(phi / 3.0 + 4.0 * std::numbers::pi / 3.0) - a / 3.0;
    const double x_plus = r * std::cos(phi / 3.0) - a / 3.0;
    v_plus_ = (x_plus - m) * std::exp(0.5 * (log_g(x_plus) - log_g_mode_));
    v_minus_ = (x_minus - m) * std::exp(0.5 * (log_g(x_minus) - log_g_mode_));
  }

  // Constant / power / exponential hat for lambda < 1 and small omega,
  // where the density is not T-concave.
  void setup_hat() {
    x0_ = omega_ / (1.0 - lambda_);
    xs_ = std::max(x0_, 2.0 / omega_);
    k1_ = std::exp(log_g_mode_);
    area1_ = k1_ * x0_;
    if (x0_ < 2.0 / omega_) {
      k2_ = std::exp(-omega_);
      area2_ = lambda_ > 0.0
                   ? k2_ * (std::pow(2.0 / omega_, lambda_) - std::pow(x0_, lambda_)) / lambda_
                   : k2_ * std::log(2.0 / (omega_ * x0_));
    }
    k3_ = std::pow(xs_, lambda_ - 1.0);
    area3_ = 2.0 * k3_ * std::exp(-0.5 * xs_ * omega_) / omega_;
  }

  double draw_hat(Rng& rng) const {
    const double total = area1_ + area2_ + area3_;
    for (;;) {
      double u = rng.uniform() * total;
      double x, hat;
      if (u <= area1_) {
        x = x0_ * u / area1_;
        hat = k1_;
      } else if (u <= area1_ + area2_) {
        u -= area1_;
        x = lambda_ > 0.0 ? std::pow(std::pow(x0_, lambda_) + u * lambda_ / k2_, 1.0 / lambda_)
                          : x0_ * std::exp(u / k2_);
        hat = k2_ * std::pow(x, lambda_ - 1.0);
      } else {
        u -= area1_ + area2_;
        x = -2.0 / omega_ *
            std::log(std::exp(-0.5 * xs_ * omega_) - u * omega_ / (2.0 * k3_));
        hat = k3_ * std::exp(-0.5 * omega_ * x);
      }
      if (!(x > 0.0) || !std::isfinite(x)) continue;
      if (rng.uniform() * hat <= std::exp(log_g(x))) return x;
    }
  }

  double lambda_;
  double omega_;
  double mode_ = 0.0;
  double log_g_mode_ = 0.0;
  Method method_ = Method::shifted_rou;
  double v_plus_ = 0.0;
  double v_minus_ = 0.0;
  double x0_ = 0.0, xs_ = 0.0;
  double k1_ = 0.0, k2_ = 0.0, k3_ = 0.0;
  double area1_ = 0.0, area2_ = 0.0, area3_ = 0.0;
};

class GigSampler {
 public:
  explicit GigSampler(const GigParams& g)
      : invert_(g.p < 0.0),
        scale_(std::sqrt(g.b / g.a)),
        standard_(std::fabs(g.p), 2.0 * std::sqrt(g.a * g.b)) {}

  double operator()(Rng& rng) const {
    const double y = standard_(rng);
    return scale_ * (invert_ ? 1.0 / y : y);
  }

 private:
  bool invert_;
  double scale_;
  StandardGigSampler standard_;
};

}  // namespace

// --- DistributionSpec ------------------------------------------------------

DistributionSpec DistributionSpec::gig(double p, double a, double b) {
  if (!std::isfinite(p)) throw DomainError("GIG p must be finite");
  require_positive(a, "GIG a");
  require_positive(b, "GIG b");
  return DistributionSpec(GigParams{p, a, b});
}

DistributionSpec DistributionSpec::inverse_gaussian(double mu, double lambda) {
  require_positive(mu, "IG mu");
  require_positive(lambda, "IG lambda");
  return DistributionSpec(IgParams{mu, lambda});
}

DistributionSpec DistributionSpec::gamma(double alpha, double beta) {
  require_positive(alpha, "Gamma alpha");
  require_positive(beta, "Gamma beta");
  return DistributionSpec(GammaParams{alpha, beta});
}

Family DistributionSpec::family() const noexcept {
  switch (params_.index()) {
    case 0:
      return Family::gig;
    case 1:
      return Family::inverse_gaussian;
    default:
      return Family::gamma;
  }
}

std::string DistributionSpec::family_name() const {
  switch (family()) {
    case Family::gig:
      return "gig";
    case Family::inverse_gaussian:
      return "ig";
    case Family::gamma:
      return "gamma";
  }
  return "";
}

std::string DistributionSpec::params_string() const {
  return std::visit(
      Overloaded{
          [](const GigParams& g) {
            return "p=" + format_number(g.p) + ";a=" + format_number(g.a) +
                   ";b=" + format_number(g.b);
          },
          [](const IgParams& g) {
            return "mu=" + format_number(g.mu) + ";lambda=" + format_number(g.lambda);
          },
          [](const GammaParams& g) {
            return "alpha=" + format_number(g.alpha) + ";beta=" + format_number(g.beta);
          },
      },
      params_);
}

std::string DistributionSpec::label() const {
  std::string params = params_string();
  std::replace(params.begin(), params.end(), ';', ',');
  std::string spaced;
  for (char c : params) {
    spaced += c;
    if (c == ',') spaced += ' ';
  }
  return family_name() + "(" + spaced + ")";
}

bool operator==(const DistributionSpec& x, const DistributionSpec& y) {
  if (x.params_.index() != y.params_.index()) return false;
  return std::visit(
      Overloaded{
          [&](const GigParams& g) {
            const auto& h = std::get<GigParams>(y.params_);
            return g.p == h.p && g.a == h.a && g.b == h.b;
          },
          [&](const IgParams& g) {
            const auto& h = std::get<IgParams>(y.params_);
            return g.mu == h.mu && g.lambda == h.lambda;
          },
          [&](const GammaParams& g) {
            const auto& h = std::get<GammaParams>(y.params_);
            return g.alpha == h.alpha && g.beta == h.beta;
          },
      },
      x.params_);
}

GigEmbedding as_gig(const DistributionSpec& spec) {
  return std::visit(
      Overloaded{
          [](const GigParams& g) { return GigEmbedding{g.p, g.a, g.b, false}; },
          [](const IgParams& g) {
            const GigParams e = ig_to_gig(g);
            return GigEmbedding{e.p, e.a, e.b, false};
          },
          [](const GammaParams& g) { return GigEmbedding{g.alpha, g.beta, 0.0, true}; },
      },
      spec.params());
}

// --- Sample ----------------------------------------------------------------

Sample::Sample(std::vector<double> values, std::optional<std::string> source)
    : values_(std::move(values)), source_(std::move(source)) {
  if (values_.empty()) throw DomainError("sample must contain at least one value");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw DomainError("sample value at index " + std::to_string(i) +
                        " must be positive and finite, got " + format_number(v));
    }
  }
}

Sample Sample::scaled(double c) const {
  require_positive(c, "scale factor");
  std::vector<double> out(values_.begin(), values_.end());
  for (double& v : out) v *= c;
  return Sample(std::move(out), source_);
}

// --- densities and moments -------------------------------------------------

double log_pdf(const DistributionSpec& spec, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("density requires finite x > 0, got " + format_number(x));
  }
  return std::visit(
      Overloaded{
          [x](const GigParams& g) {
            return gig_log_normalizer(g) + (g.p - 1.0) * std::log(x) - g.a * x - g.b / x;
          },
          [x](const IgParams& g) {
            const double d = x - g.mu;
            return 0.5 * (std::log(g.lambda) - std::log(2.0 * std::numbers::pi) -
                          3.0 * std::log(x)) -
                   g.lambda * d * d / (2.0 * g.mu * g.mu * x);
          },
          [x](const GammaParams& g) {
            return g.alpha * std::log(g.beta) - specfun::log_gamma(g.alpha) +
                   (g.alpha - 1.0) * std::log(x) - g.beta * x;
          },
      },
      spec.params());
}

double pdf(const DistributionSpec& spec, double x) { return std::exp(log_pdf(spec, x)); }

double moment(const DistributionSpec& spec, double r) {
  if (!std::isfinite(r)) throw DomainError("moment order must be finite");
  if (r == 0.0) return 1.0;
  return std::visit(
      Overloaded{
          [r](const GigParams& g) { return std::exp(gig_log_moment(g, r)); },
          [r](const IgParams& g) { return std::exp(gig_log_moment(ig_to_gig(g), r)); },
          [r](const GammaParams& g) {
            if (!(g.alpha + r > 0.0)) {
              throw MomentExistenceError(
                  "E[X^r] for Gamma requires alpha + r > 0 (alpha=" +
                  format_number(g.alpha) + ", r=" + format_number(r) + ")");
            }
            return std::exp(specfun::log_gamma(g.alpha + r) -
                            specfun::log_gamma(g.alpha) - r * std::log(g.beta));
          },
      },
      spec.params());
}

MomentSet moment_set(const DistributionSpec& spec) {
  return std::visit(
      Overloaded{
          [](const GigParams& g) {
            const double mu = std::exp(gig_log_moment(g, 1.0));
            const double nu = std::exp(gig_log_moment(g, -1.0));
            const double m2 = std::exp(gig_log_moment(g, 2.0));
            const double mm2 = std::exp(gig_log_moment(g, -2.0));
            return MomentSet{mu, nu, m2 - mu * mu, mm2 - nu * nu, 1.0 - mu * nu};
          },
          [](const IgParams& g) {
            const double mu = g.mu;
            const double lam = g.lambda;
            return MomentSet{mu, 1.0 / mu + 1.0 / lam, mu * mu * mu / lam,
                             1.0 / (mu * lam) + 2.0 / (lam * lam), -mu / lam};
          },
          [](const GammaParams& g) {
            if (!(g.alpha > 2.0)) {
              throw MomentExistenceError(
                  "Var(1/X) for Gamma requires alpha > 2 (alpha=" +
                  format_number(g.alpha) + ")");
            }
            const double a = g.alpha;
            const double b = g.beta;
            return MomentSet{a / b, b / (a - 1.0), a / (b * b),
                             b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0)),
                             -1.0 / (a - 1.0)};
          },
      },
      spec.params());
}

double log_joint_laplace(const DistributionSpec& spec, double s, double t) {
  if (!(s >= 0.0) || !(t >= 0.0) || !std::isfinite(s) || !std::isfinite(t)) {
    throw DomainError("joint Laplace transform requires finite s, t >= 0");
  }
  if (s == 0.0 && t == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const GigParams& g) { return gig_log_laplace(g, s, t); },
          [&](const IgParams& g) { return gig_log_laplace(ig_to_gig(g), s, t); },
          [&](const GammaParams& g) { return gamma_log_laplace(g, s, t); },
      },
      spec.params());
}

double joint_laplace(const DistributionSpec& spec, double s, double t) {
  return std::exp(log_joint_laplace(spec, s, t));
}

double mode(const DistributionSpec& spec) {
  return std::visit(
      Overloaded{
          [](const GigParams& g) {
            return ((g.p - 1.0) + std::sqrt((g.p - 1.0) * (g.p - 1.0) + 4.0 * g.a * g.b)) /
                   (2.0 * g.a);
          },
          [](const IgParams& g) {
            const double r = 1.5 * g.mu / g.lambda;
            return g.mu * (std::sqrt(1.0 + r * r) - r);
          },
          [](const GammaParams& g) { return g.alpha >= 1.0 ? (g.alpha - 1.0) / g.beta : 0.0; },
      },
      spec.params());
}

// --- sampling --------------------------------------------------------------

void draw_into(const DistributionSpec& spec, Rng& rng, std::span<double> out) {
  std::visit(
      Overloaded{
          [&](const GigParams& g) {
            const GigSampler sampler(g);
            for (double& v : out) v = sampler(rng);
          },
          [&](const IgParams& g) {
            for (double& v : out) v = ig_variate(g.mu, g.lambda, rng);
          },
          [&](const GammaParams& g) {
            for (double& v : out) v = gamma_variate(g.alpha, g.beta, rng);
          },
      },
      spec.params());
}

double draw(const DistributionSpec& spec, Rng& rng) {
  double v = 0.0;
  draw_into(spec, rng, std::span<double>(&v, 1));
  return v;
}

Sample sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("sample size must be at least 1");
  Rng rng(seed);
  std::vector<double> values(n);
  draw_into(spec, rng, values);
  return Sample(std::move(values), "simulated " + spec.label());
}

}  // namespace ahi
