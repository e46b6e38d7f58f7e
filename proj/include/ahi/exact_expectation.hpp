#pragma once

#include <cstddef>
#include <string>

#include "ahi/distributions.hpp"

namespace ahi {

enum class ExactMethod {
  generic_double_integral,
  gig_single_integral,
  ig_closed_form,
  gamma_single_integral,
};

std::string method_name(ExactMethod method);

/// E[j_hat] for an i.i.d. sample of size n.
struct ExactExpectation {
  double value = 0.0;
  ExactMethod method = ExactMethod::generic_double_integral;
  double error_estimate = 0.0;
};

enum class ExactRoute {
  automatic,  // family fast path; GIG with p = 0 falls back to generic
  generic,    // always the double Laplace-transform integral
  family,     // family fast path only; GIG with p = 0 is unsupported
};

/// 1 - n^2 \iint L(s, t)^n ds dt for the joint Laplace transform L of
/// (X, 1/X). Requires finite E[X] and E[1/X].
ExactExpectation expected_jhat_generic(const DistributionSpec& spec, std::size_t n,
                                       double abs_tol = 1e-8);

/// GIG single-integral form. Throws UnsupportedCaseError when n p = 0.
ExactExpectation expected_jhat_gig(double p, double a, double b, std::size_t n,
                                   double abs_tol = 1e-10);

/// Inverse Gaussian closed form via the incomplete gamma function.
ExactExpectation expected_jhat_ig(double mu, double lambda, std::size_t n);

/// Gamma single integral; independent of the rate. Requires alpha > 1.
ExactExpectation expected_jhat_gamma(double alpha, std::size_t n, double abs_tol = 1e-10);

ExactExpectation expected_jhat(const DistributionSpec& spec, std::size_t n,
                               ExactRoute route = ExactRoute::automatic);

/// E[j_hat] - J.
double exact_bias(const DistributionSpec& spec, std::size_t n,
                  ExactRoute route = ExactRoute::automatic);

// The integral terms 1 - E[j_hat] evaluated by quadrature without the
// n = 1 shortcut. Each equals 1 at n = 1 up to quadrature error.
double generic_integral_term(const DistributionSpec& spec, std::size_t n, double abs_tol = 1e-8);
double gig_integral_term(double p, double a, double b, std::size_t n, double abs_tol = 1e-10);
double gamma_integral_term(double alpha, std::size_t n, double abs_tol = 1e-10);

}  // namespace ahi
