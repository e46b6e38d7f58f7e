#include "ahi/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "ahi/error.hpp"

namespace ahi::quadrature {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// 15-point Kronrod abscissae; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  double floor;  // roundoff floor of the error estimate
  bool operator<(const Segment& other) const { return error < other.error; }
};

class Evaluator {
 public:
  Evaluator(const Integrand& f, std::size_t budget) : f_(f), budget_(budget) {}

  double operator()(double x) {
    ++count_;
    const double v = f_(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrand returned a non-finite value at x=" << x;
      throw EvaluationError(msg.str());
    }
    return v;
  }

  std::size_t count() const { return count_; }
  bool exhausted() const { return count_ >= budget_ || budget_ - count_ < 30; }

 private:
  const Integrand& f_;
  std::size_t budget_;
  std::size_t count_ = 0;
};

Segment kronrod15(Evaluator& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double abs_half = std::fabs(half);

  std::array<double, 7> fv1{};
  std::array<double, 7> fv2{};
  const double fc = f(centre);
  double res_gauss = fc * kWg[3];
  double res_kronrod = fc * kWgk[7];
  double res_abs = std::fabs(res_kronrod);

  for (int j = 0; j < 3; ++j) {
    const int jt = 2 * j + 1;
    const double dx = half * kXgk[jt];
    const double f1 = f(centre - dx);
    const double f2 = f(centre + dx);
    fv1[jt] = f1;
    fv2[jt] = f2;
    res_gauss += kWg[j] * (f1 + f2);
    res_kronrod += kWgk[jt] * (f1 + f2);
    res_abs += kWgk[jt] * (std::fabs(f1) + std::fabs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jt = 2 * j;
    const double dx = half * kXgk[jt];
    const double f1 = f(centre - dx);
    const double f2 = f(centre + dx);
    fv1[jt] = f1;
    fv2[jt] = f2;
    res_kronrod += kWgk[jt] * (f1 + f2);
    res_abs += kWgk[jt] * (std::fabs(f1) + std::fabs(f2));
  }

  const double mean = 0.5 * res_kronrod;
  double res_asc = kWgk[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    res_asc += kWgk[j] * (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));
  }

  res_abs *= abs_half;
  res_asc *= abs_half;
  double err = std::fabs((res_kronrod - res_gauss) * half);
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  const double floor = 50.0 * kEps * res_abs;
  err = std::max(err, floor);
  return {lo, hi, res_kronrod * half, err, floor};
}

QuadratureResult adaptive(Evaluator& f, double lo, double hi,
                          const QuadratureOptions& options) {
  std::priority_queue<Segment> heap;
  double total = 0.0;
  double total_err = 0.0;
  double total_floor = 0.0;
  double frozen_err = 0.0;

  {
    const Segment s = kronrod15(f, lo, hi);
    total = s.value;
    total_err = s.error;
    total_floor = s.floor;
    heap.push(s);
  }

  auto target = [&] {
    return std::max(options.abs_tol, options.rel_tol * std::fabs(total));
  };

  while (total_err > target() && total_err > 2.0 * total_floor) {
    if (heap.empty()) break;
    if (f.exhausted()) {
      std::ostringstream msg;
      msg << "quadrature budget of " << options.max_evaluations
          << " evaluations exhausted; error estimate " << total_err
          << " exceeds tolerance " << target();
      throw ConvergenceError(msg.str(), total, total_err);
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    // Interval cannot be split further in floating point.
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) < 4.0 * kEps * std::max(1.0, std::fabs(mid))) {
      frozen_err += worst.error;
      continue;
    }
    const Segment left = kronrod15(f, worst.lo, mid);
    const Segment right = kronrod15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_floor += left.floor + right.floor - worst.floor;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  double sum = 0.0;
  double err = frozen_err;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, f.count()};
}

}  // namespace

QuadratureResult integrate_interval(const Integrand& f, double lo, double hi,
                                    const QuadratureOptions& options) {
  if (!(options.abs_tol > 0.0)) throw DomainError("abs_tol must be positive");
  Evaluator eval(f, options.max_evaluations);
  return adaptive(eval, lo, hi, options);
}

QuadratureResult integrate_semi_infinite(const Integrand& f, double lower,
                                         const QuadratureOptions& options) {
  if (!(options.abs_tol > 0.0)) throw DomainError("abs_tol must be positive");
  if (!std::isfinite(lower)) throw DomainError("lower limit must be finite");
  const Integrand mapped = [&f, lower](double u) {
    const double w = 1.0 - u;
    const double x = lower + u / w;
    if (!std::isfinite(x)) return 0.0;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (w * w);
  };
  Evaluator eval(mapped, options.max_evaluations);
  return adaptive(eval, 0.0, 1.0, options);
}

QuadratureResult integrate_semi_infinite(const Integrand& f, double lower,
                                         double abs_tol) {
  QuadratureOptions options;
  options.abs_tol = abs_tol;
  return integrate_semi_infinite(f, lower, options);
}

QuadratureResult integrate_double_semi_infinite(
    const Integrand2& f, const QuadratureOptions& options) {
  if (!(options.abs_tol > 0.0)) throw DomainError("abs_tol must be positive");
  std::size_t used = 0;

  QuadratureOptions inner_options;
  inner_options.abs_tol = 1e-16;
  inner_options.rel_tol = 0.1 * options.abs_tol;

  const Integrand outer = [&](double t) {
    if (used >= options.max_evaluations) {
      throw ConvergenceError("double integral budget exhausted", 0.0,
                             std::numeric_limits<double>::infinity());
    }
    inner_options.max_evaluations = options.max_evaluations - used;
    const Integrand inner = [&f, t](double s) { return f(s, t); };
    const QuadratureResult r = integrate_semi_infinite(inner, 0.0, inner_options);
    used += r.evaluations;
    return r.value;
  };

  QuadratureOptions outer_options = options;
  outer_options.max_evaluations = std::numeric_limits<std::size_t>::max();
  try {
    QuadratureResult r = integrate_semi_infinite(outer, 0.0, outer_options);
    r.evaluations = used;
    return r;
  } catch (const ConvergenceError& e) {
    std::ostringstream msg;
    msg << "double integral did not converge within " << options.max_evaluations
        << " evaluations: " << e.what();
    throw ConvergenceError(msg.str(), e.best_estimate(), e.error_estimate());
  }
}

QuadratureResult integrate_double_semi_infinite(const Integrand2& f,
                                                double abs_tol) {
  QuadratureOptions options;
  options.abs_tol = abs_tol;
  return integrate_double_semi_infinite(f, options);
}

}  // namespace ahi::quadrature
