#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ahi/error.hpp"
#include "ahi/quadrature.hpp"
#include "ahi/specfun.hpp"

using namespace ahi::quadrature;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("finite interval integrals") {
  CHECK_THAT(integrate_interval([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value,
             WithinAbs(2.0, 1e-12));
  CHECK_THAT(integrate_interval([](double x) { return std::sqrt(x); }, 0.0, 1.0).value,
             WithinAbs(2.0 / 3.0, 1e-9));
  CHECK_THAT(integrate_interval([](double x) { return std::log(x); }, 0.0, 1.0).value,
             WithinAbs(-1.0, 1e-9));
  // Reversed limits flip the sign.
  CHECK_THAT(integrate_interval([](double x) { return x * x; }, 1.0, 0.0).value,
             WithinAbs(-1.0 / 3.0, 1e-14));
}

TEST_CASE("finite interval integrals agree with Boost Gauss-Kronrod") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> coef(0.1, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double c = coef(gen), d = coef(gen);
    auto f = [c, d](double x) { return std::exp(-c * x) * std::cos(d * x); };
    const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 3.0, 15, 1e-14);
    CHECK_THAT(integrate_interval(f, 0.0, 3.0, {1e-13, 0.0, 1'000'000}).value, WithinAbs(ref, 1e-12));
  }
}

TEST_CASE("semi-infinite integrals") {
  CHECK_THAT(integrate_semi_infinite([](double x) { return std::exp(-x); }, 0.0).value,
             WithinAbs(1.0, 1e-10));
  CHECK_THAT(integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x * x); }, 0.0).value,
             WithinAbs(std::numbers::pi / 2.0, 1e-8));
  CHECK_THAT(integrate_semi_infinite([](double x) { return std::exp(-x); }, 2.0).value,
             WithinAbs(std::exp(-2.0), 1e-10));
  CHECK_THAT(
      integrate_semi_infinite([](double x) { return std::exp(-x) / std::sqrt(x); }, 0.0, {1e-7, 0.0, 1'000'000}).value,
      WithinAbs(std::sqrt(std::numbers::pi), 1e-6));
}

TEST_CASE("relative tolerance accepts tiny integrals") {
  QuadratureOptions opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-12;
  const auto r = integrate_semi_infinite([](double x) { return 1e-200 * std::exp(-x); }, 0.0, opt);
  CHECK_THAT(r.value, WithinRel(1e-200, 1e-11));
}

TEST_CASE("budget exhaustion raises ConvergenceError with the best estimate") {
  QuadratureOptions opt;
  opt.abs_tol = 1e-15;
  opt.max_evaluations = 60;
  try {
    integrate_interval([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, opt);
    FAIL("expected ConvergenceError");
  } catch (const ahi::ConvergenceError& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_estimate() > 1e-15);
  }
}

TEST_CASE("double semi-infinite integrals") {
  CHECK_THAT(integrate_double_semi_infinite([](double s, double t) { return std::exp(-s - 2.0 * t); }).value,
             WithinAbs(0.5, 1e-7));
  CHECK_THAT(integrate_double_semi_infinite([](double s, double t) { return std::pow(1.0 + s + t, -3.0); }).value,
             WithinAbs(0.5, 1e-6));
  // Argument order: s first.
  CHECK_THAT(integrate_double_semi_infinite([](double s, double t) { return std::exp(-s) * std::exp(-t) * s; }).value,
             WithinAbs(1.0, 1e-7));
}

TEST_CASE("documented quadrature examples") {
  CHECK_THAT(integrate_semi_infinite([](double x) { return x * std::exp(-2.0 * x); }, 0.0).value,
             WithinAbs(0.25, 1e-10));
  CHECK_THAT(integrate_semi_infinite([](double x) { return std::pow(x, -4.0) * std::exp(-x); }, 2.5, 1e-12).value,
             WithinRel(ahi::specfun::upper_incomplete_gamma(-3.0, 2.5), 1e-9));
  CHECK_THAT(integrate_double_semi_infinite([](double s, double t) { return std::exp(-s - t); }).value,
             WithinAbs(1.0, 1e-7));
  CHECK_THAT(integrate_double_semi_infinite([](double s, double t) { return std::exp(-2.0 * s - 3.0 * t); }).value,
             WithinAbs(1.0 / 6.0, 1e-7));
}
