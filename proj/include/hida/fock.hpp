#pragma once

#include <string>
#include <vector>

#include "hida/grid.hpp"
#include "hida/growth.hpp"
#include "hida/legendre.hpp"
#include "hida/report.hpp"
#include "json.hpp"

namespace hida {

/// Weighted l^2 model of the chain of Hilbert spaces: coordinate k carries
/// weight rho^{-2p(k+1)} at level p (negative p gives the dual norms).
struct SequenceSpaceModel {
  double rho = 0.5;
  int d = 32;
  /// Level used where a fixed reference level is needed; not derived.
  double p0 = 1.0;

  void validate() const;
  double norm(const std::vector<double>& x, double p) const;
  /// Squared Hilbert-Schmidt norm of the inclusion of level q into level p < q.
  double hs_norm_sq(double q, double p) const;
  /// The same series summed term by term.
  double hs_norm_sq_direct(double q, double p) const;
  /// rho^{2p}: the dual weight |x|_{-p}^2 / x^2 of a one-dimensional vector.
  double dual_weight(double p) const;
};

/// Scalar chaos coefficients c_n (standing for |f_n|_p), optionally stored as logs.
struct ChaosSequence {
  std::vector<double> c;
  double level = 0.0;
  bool log_domain = false;

  std::size_t size() const { return c.size(); }
  double log_abs(std::size_t n) const;
  std::size_t degree() const;  // highest n with c_n != 0

  static ChaosSequence delta(std::size_t n, std::size_t length = 0);
  /// c_n = xi^n / n!, n = 0..n_max, in log-domain.
  static ChaosSequence exponential_vector(double xi, std::size_t n_max);

  /// Accepts a bare array or {"coefficients": [...], "level": p, "log_domain": b}.
  static ChaosSequence from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// (sum_n |c_n|^2 / l(n))^{1/2}.
double test_norm(const ChaosSequence& seq, const LegendreTable& table);
double log_test_norm(const ChaosSequence& seq, const LegendreTable& table);
/// (sum_n (n!)^2 l(n) |c_n|^2)^{1/2}.
double dual_norm(const ChaosSequence& seq, const LegendreTable& table);
double log_dual_norm(const ChaosSequence& seq, const LegendreTable& table);

/// sqrt(L_u(xi^2)), the dual norm of the exponential vector with |xi| = xi.
double exp_vector_norm(double xi, const LFunctionEvaluator& ev);

struct PairingBound {
  double pairing = 0.0;  // sum n! F_n f_n
  double bound = 0.0;    // test_norm(F) * dual_norm(f)
  bool holds = false;
};
PairingBound pairing_bound(const ChaosSequence& test, const ChaosSequence& dual, const LegendreTable& table);

/// sum_n f_n He_n(x) with probabilists' Hermite polynomials.
double hermite_eval_1d(const ChaosSequence& seq, double x);

struct ANorm {
  double value = 0.0;
  double x_at = 0.0;
  bool boundary = false;  // the supremum sits at the largest |x| of the grid
  std::vector<std::string> warnings;
};

/// Grid supremum of |phi(x)| u(rho^{2p} x^2)^{-1/2}.
ANorm a_norm_1d(const ChaosSequence& seq, const GrowthFunction& f, double p, const Grid& x_grid,
                const SequenceSpaceModel& model = {});

/// Witness C = a_norm / test_norm for |phi(x)| <= C ||phi|| u(x^2 w)^{1/2}.
VerificationReport growth_bound_check(const ChaosSequence& seq, const GrowthFunction& f, double p,
                                      const Grid& x_grid, const LegendreTable& table,
                                      const SequenceSpaceModel& model = {});

struct STransform {
  double value = 0.0;
  int order = 0;
  bool exact = true;  // 2 order - 1 >= degree
  std::vector<std::string> warnings;
};

/// E[phi(x + xi)] for standard Gaussian x by Gauss-Hermite quadrature of the given order.
STransform s_transform_1d(const ChaosSequence& seq, double xi, int order);

struct GaussHermiteRule {
  std::vector<double> nodes, weights;  // weights sum to 1
};
/// Golub-Welsch rule for the standard normal density.
GaussHermiteRule gauss_hermite(int order);

/// Checks |F(xi)| <= K u(a xi^2)^{1/2} on the circles |xi| = R of the radius
/// grid (throws HypothesisViolatedError naming the first failing radius), then
/// |f_n|^2 <= K^2 a^n l(n) for every Taylor coefficient.
VerificationReport cauchy_coefficient_bound(const std::vector<double>& taylor, double K, double a,
                                            const GrowthFunction& f, const LegendreTable& table,
                                            const Grid& radius_grid);

}  // namespace hida
