#include "hida/bell.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hida/errors.hpp"
#include "hida/numerics.hpp"

namespace hida {

std::vector<BellInt> bell_numbers(int k, int n_max) {
  if (k < 1) throw ParameterError("bell_numbers: k must be >= 1, got " + std::to_string(k));
  if (n_max < 0) throw ParameterError("bell_numbers: n_max must be >= 0");

  // EGF coefficients of exp_1 = e^r are all 1.
  std::vector<BellInt> prev(static_cast<std::size_t>(n_max) + 1, BellInt(1));
  int n_reached = n_max;
  for (int level = 2; level <= k; ++level) {
    // exp_level = exp(H) with H = exp_{level-1} - 1; EGF composition
    // g_n = sum_{i=1}^{n} C(n-1, i-1) h_i g_{n-i}.
    std::vector<BellInt> g(static_cast<std::size_t>(n_reached) + 1);
    std::vector<BellInt> binom{BellInt(1)};  // row n-1 of Pascal's triangle
    g[0] = 1;
    int n = 1;
    try {
      for (; n <= n_reached; ++n) {
        if (n > 1) {
          std::vector<BellInt> next(static_cast<std::size_t>(n));
          next[0] = 1;
          next[n - 1] = 1;
          for (int i = 1; i < n - 1; ++i) next[i] = binom[i - 1] + binom[i];
          binom.swap(next);
        }
        BellInt acc = 0;
        for (int i = 1; i <= n; ++i) acc += binom[i - 1] * prev[i] * g[n - i];
        g[n] = acc;
      }
    } catch (const std::overflow_error&) {
      // Every level is dominated by the final one, so the first overflow
      // bounds the usable range of the result.
      throw CapacityError("bell_numbers: b_" + std::to_string(k) + "(" + std::to_string(n) +
                              ") exceeds 4096 bits",
                          n - 1);
    } catch (const std::range_error&) {
      throw CapacityError("bell_numbers: b_" + std::to_string(k) + "(" + std::to_string(n) +
                              ") exceeds 4096 bits",
                          n - 1);
    }
    prev.swap(g);
  }
  return prev;
}

std::vector<double> log_exp_k_taylor(int k, int n_max) {
  if (k < 1) throw ParameterError("log_exp_k_taylor: k must be >= 1");
  if (n_max < 0) throw ParameterError("log_exp_k_taylor: n_max must be >= 0");
  const auto size = static_cast<std::size_t>(n_max) + 1;
  std::vector<double> g(size);
  for (std::size_t n = 0; n < size; ++n) g[n] = -std::lgamma(static_cast<double>(n) + 1.0);

  std::vector<double> terms(size);
  for (int level = 2; level <= k; ++level) {
    // G = exp(H), H = previous - 1: n G_n = sum_i i H_i G_{n-i}.
    const std::vector<double> h = g;
    g[0] = 0.0;
    for (std::size_t n = 1; n < size; ++n) {
      double m = kNegInf;
      for (std::size_t i = 1; i <= n; ++i) {
        terms[i] = std::log(static_cast<double>(i)) + h[i] + g[n - i];
        m = std::max(m, terms[i]);
      }
      double s = 0.0;
      for (std::size_t i = 1; i <= n; ++i) s += std::exp(terms[i] - m);
      g[n] = m + std::log(s) - std::log(static_cast<double>(n));
    }
  }
  return g;
}

namespace {

// L_1(z) = z, L_j(z) = expm1(L_{j-1}(z)); log exp_k(z) = L_k(z).
struct SaddleEval {
  double F;       // log psi'(x) = x + sum_{j<k} L_j(e^x)
  double dF;      // 1 + sum_{j<k} D_j, D_j = d/dx L_j(e^x)
  double psi;     // L_k(e^x)
};

SaddleEval eval_saddle(int k, double x) {
  double L = std::exp(x);  // L_1
  double logD = x;         // log D_1
  double F = x;
  double dF = 1.0;
  for (int j = 1; j < k; ++j) {
    F += L;
    dF += std::exp(logD);
    logD += L;  // log D_{j+1} = log D_j + L_j
    L = std::expm1(L);
  }
  return {F, dF, L};
}

// x-derivatives 1..4 of L_k(e^x).
std::array<double, 4> eval_jet(int k, double x) {
  const double e = std::exp(x);
  std::array<double, 4> d{e, e, e, e};
  double L = e;
  for (int j = 1; j < k; ++j) {
    const double E = std::exp(L);
    const auto [g1, g2, g3, g4] = d;
    d = {E * g1, E * (g2 + g1 * g1), E * (g3 + 3 * g1 * g2 + g1 * g1 * g1),
         E * (g4 + 4 * g1 * g3 + 3 * g2 * g2 + 6 * g1 * g1 * g2 + g1 * g1 * g1 * g1)};
    L = std::expm1(L);
  }
  return d;
}

}  // namespace

ExpKSaddle exp_k_saddle(int k, double n, double x_guess) {
  if (k < 1) throw ParameterError("exp_k_saddle: k must be >= 1");
  if (!(n > 0.0)) throw ParameterError("exp_k_saddle: n must be > 0");
  const double target = std::log(n);
  // F is convex and increasing with F(x) >= x, so the root lies in [lo, target].
  double lo = std::min(-50.0, target - 1.0), hi = target;
  double x = std::isfinite(x_guess) ? std::clamp(x_guess, lo, hi) : std::min(hi, std::log1p(target));
  double dx_old = hi - lo;
  for (int it = 0; it < 400; ++it) {
    const SaddleEval e = eval_saddle(k, x);
    const double f = e.F - target;
    if (std::isfinite(f)) {
      if (f > 0.0)
        hi = std::min(hi, x);
      else
        lo = std::max(lo, x);
      if (std::abs(f) < 1e-15 * std::max(1.0, std::abs(target))) break;
    } else {
      hi = std::min(hi, x);
    }
    // Newton unless it leaves the bracket or shrinks slower than bisection.
    double next = (std::isfinite(f) && std::isfinite(e.dF)) ? x - f / e.dF : lo - 1.0;
    if (!(next > lo && next < hi) || std::abs(next - x) > 0.5 * std::abs(dx_old)) next = 0.5 * (lo + hi);
    dx_old = next - x;
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  const SaddleEval e = eval_saddle(k, x);
  const double psi2 = n * e.dF;
  // Next saddle-point term: 1 + psi4 / (8 psi2^2) - 5 psi3^2 / (24 psi2^3).
  const auto jet = eval_jet(k, x);
  const double p3 = jet[2] / psi2, p4 = jet[3] / psi2;
  const double log_coeff = e.psi - n * x -
                           0.5 * (std::log(2.0 * std::numbers::pi) + std::log(n) + std::log(e.dF)) +
                           std::log1p(p4 / (8.0 * psi2) - 5.0 * p3 * p3 / (24.0 * psi2));
  return {x, log_coeff, psi2};
}

std::shared_ptr<const ExpKCoefficients> ExpKCoefficients::get(int k) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ExpKCoefficients>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<const ExpKCoefficients>(k, 4096);
  cache.emplace(k, table);
  return table;
}

ExpKCoefficients::ExpKCoefficients(int k, int table_size)
    : k_(k), table_(log_exp_k_taylor(k, table_size)) {
  const double N = table_size;
  tail_correction_ = (table_.back() - exp_k_saddle(k, N).log_coeff) * N * N;
}

double ExpKCoefficients::log_coeff(int n) const {
  if (n < 0) return kNegInf;
  if (n < static_cast<int>(table_.size())) return table_[static_cast<std::size_t>(n)];
  return log_coeff_real(static_cast<double>(n));
}

double ExpKCoefficients::log_coeff_real(double n, double* x_hint) const {
  const double N = table_size();
  if (n <= N) {
    const double fl = std::floor(n);
    const auto i = static_cast<std::size_t>(fl);
    if (fl == n || i + 1 >= table_.size()) return table_[i];
    const double w = n - fl;  // linear interpolation between integers
    return (1.0 - w) * table_[i] + w * table_[i + 1];
  }
  const ExpKSaddle s = exp_k_saddle(k_, n, x_hint ? *x_hint : std::numeric_limits<double>::quiet_NaN());
  if (x_hint) *x_hint = s.x;
  return s.log_coeff + tail_correction_ / (n * n);
}

double ExpKCoefficients::saddle_x(double n, double x_hint) const {
  return exp_k_saddle(k_, std::max(n, 1e-300), x_hint).x;
}

double ExpKCoefficients::saddle_psi2(double n) const { return exp_k_saddle(k_, std::max(n, 1e-300)).psi2; }

}  // namespace hida
