#include "hida/mittag_leffler.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "hida/errors.hpp"
#include "hida/numerics.hpp"

namespace hida {

namespace {

void check_args(double lambda, double t) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ParameterError("mittag_leffler: lambda must lie in (0, 1]");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("mittag_leffler: t must be finite and >= 0");
}

constexpr double kSeriesMaxTerm = 1e8;

}  // namespace

double mittag_leffler_log_max_term(double lambda, double t) {
  check_args(lambda, t);
  if (t == 0.0) return 0.0;
  const double lt = std::log(t);
  // n log t - lgamma(1 + lambda n) is concave in n; its slope is
  // log t - lambda psi(1 + lambda n).
  auto slope = [&](double n) { return lt - lambda * boost::math::digamma(1.0 + lambda * n); };
  if (slope(0.0) <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (slope(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 0.5; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  auto term = [&](double n) { return n * lt - std::lgamma(1.0 + lambda * n); };
  return std::max({0.0, term(std::floor(lo)), term(std::ceil(hi))});
}

double mittag_leffler_series(double lambda, double t) {
  check_args(lambda, t);
  if (t == 0.0) return 1.0;
  const long double lt = std::log(static_cast<long double>(t));
  CompensatedSum<long double> sum;
  long double peak = 0.0L;
  for (int n = 0; n < 100000; ++n) {
    const long double logmag = n * lt - std::lgamma(1.0L + static_cast<long double>(lambda) * n);
    const long double mag = std::exp(logmag);
    sum.add(n % 2 == 0 ? mag : -mag);
    peak = std::max(peak, mag);
    if (n > 2 && mag < 1e-22L * std::max(peak, 1.0L) && logmag < std::log(peak)) break;
  }
  return static_cast<double>(sum.value());
}

double mittag_leffler_spectral(double lambda, double t) {
  check_args(lambda, t);
  if (lambda == 1.0) throw ParameterError("mittag_leffler_spectral: lambda must be < 1");
  if (t == 0.0) return 1.0;
  const double c = std::cos(lambda * std::numbers::pi);
  const double pref = std::sin(lambda * std::numbers::pi) / (lambda * std::numbers::pi);
  auto f = [&](double s) {
    const double den = s * s + 2.0 * s * c + 1.0;
    return std::exp(-std::pow(t * s, 1.0 / lambda)) / den;
  };
  // The kernel peaks at s = -cos(lambda pi) when lambda > 1/2.
  const double s0 = std::max(-c, 0.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double total = 0.0;
  double a = 0.0;
  if (s0 > 0.0) {
    total += ts.integrate(f, 0.0, s0, 1e-15);
    a = s0;
  }
  total += ts.integrate(f, a, a + 1.0, 1e-15);
  const double b = a + 1.0;
  total += es.integrate([&](double s) { return f(b + s); }, 1e-15);
  return pref * total;
}

double mittag_leffler(double lambda, double t) {
  check_args(lambda, t);
  if (lambda == 1.0) return std::exp(-t);
  if (t == 0.0) return 1.0;
  if (mittag_leffler_log_max_term(lambda, t) < std::log(kSeriesMaxTerm)) return mittag_leffler_series(lambda, t);
  return mittag_leffler_spectral(lambda, t);
}

}  // namespace hida
