#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <limits>
#include <memory>
#include <vector>

namespace hida {

/// 4096-bit unsigned integer that throws on overflow.
using BellInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<
    4096, 4096, boost::multiprecision::unsigned_magnitude, boost::multiprecision::checked, void>>;

/// k-th order Bell numbers b_k(0..n_max), b_k(n) = n! [r^n] exp_k(r) with
/// exp_1(r) = e^r and exp_j(r) = exp(exp_{j-1}(r) - 1). So b_1 = 1, b_2 are the
/// classical Bell numbers, b_3 = 1, 1, 3, 12, 60, ...
///
/// Exact. Throws CapacityError (carrying the largest n that fits) when a value
/// exceeds BellInt, ParameterError for k < 1 or n_max < 0.
std::vector<BellInt> bell_numbers(int k, int n_max);

/// log [z^n] exp_k(z) for n = 0..n_max by log-domain power-series composition.
std::vector<double> log_exp_k_taylor(int k, int n_max);

/// Saddle point of the Cauchy integral for [z^n] exp_k(z), in x = log z.
struct ExpKSaddle {
  double x;          // solves d/dx log exp_k(e^x) = n
  double log_coeff;  // leading-order approximation of log [z^n] exp_k(z)
  double psi2;       // second x-derivative of log exp_k(e^x) at the saddle
};

ExpKSaddle exp_k_saddle(int k, double n,
                        double x_guess = std::numeric_limits<double>::quiet_NaN());

/// log [z^n] exp_k(z) for any real n >= 0: the exact composition table up to
/// table_size(), then the saddle-point form (through its 1/n term) with the 1/n^2 remainder matched to
/// the table's last entry. Immutable; shared across threads.
class ExpKCoefficients {
 public:
  static std::shared_ptr<const ExpKCoefficients> get(int k);

  ExpKCoefficients(int k, int table_size);

  int k() const { return k_; }
  int table_size() const { return static_cast<int>(table_.size()) - 1; }

  double log_coeff(int n) const;
  /// Continuous extension; equals log_coeff(n) on integers inside the table.
  double log_coeff_real(double n, double* x_hint = nullptr) const;
  /// The saddle x(n); d/dn log_coeff_real(n) is approximately -x(n).
  double saddle_x(double n, double x_hint = std::numeric_limits<double>::quiet_NaN()) const;
  double saddle_psi2(double n) const;

 private:
  int k_;
  std::vector<double> table_;
  double tail_correction_;  // (exact - asymptotic) * N^2 at the last table entry
};

}  // namespace hida
