#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hida/growth.hpp"
#include "json.hpp"

namespace hida {

struct LegendreOptions {
  double tol = 1e-12;     // golden-section tolerance in s = log r
  int max_iter = 200;
  double s_start = 40.0;  // initial bracket [-s_start, s_start]
  double s_bound = 700.0; // bracket expansion stops here
};

struct LegendrePoint {
  double t;
  double log_ell;
  double r_star;
};

/// l_u(t) = inf_{r>0} u(r) / r^t, minimising phi(s) = log u(e^s) - t s.
/// `s_left` is a known left bracket (e.g. log r*(t') for some t' < t).
/// t = 0 returns the grid infimum of u. Throws UnboundedBelowError when no
/// bracket exists inside [-s_bound, s_bound].
LegendrePoint legendre_transform(const GrowthFunction& f, double t, const LegendreOptions& opt = {},
                                 std::optional<double> s_left = std::nullopt);
LegendrePoint legendre_transform(const GrowthFunctionSpec& spec, double t);

/// Memoised (t, log l_u(t), r*(t)) for one growth function. Immutable.
class LegendreTable {
 public:
  LegendreTable() = default;
  LegendreTable(std::string function_id, std::vector<LegendrePoint> points, double tol);

  const std::string& function_id() const { return id_; }
  const std::vector<LegendrePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double tol() const { return tol_; }

  /// log l_u(t) for every entry, in table order.
  std::vector<double> log_ell() const;
  /// Entry n of an integer table (t = n). Throws if the table is not t = 0, 1, 2, ...
  double log_ell_at(std::size_t n) const;
  bool is_integer_table() const;

  /// Copy with log_ell[i] replaced; used for fault injection.
  LegendreTable with_log_ell(std::size_t i, double value) const;

  std::string to_csv() const;
  nlohmann::json to_json() const;

 private:
  std::string id_;
  std::vector<LegendrePoint> points_;
  double tol_ = 0.0;
};

/// l_u(n) for n = 0..n_max, warm-started from r*(n-1).
LegendreTable legendre_sequence(const GrowthFunction& f, int n_max, const LegendreOptions& opt = {});
LegendreTable legendre_sequence(const GrowthFunctionSpec& spec, int n_max);

/// l_u on an arbitrary set of t (sorted internally), warm-started.
LegendreTable legendre_on_grid(const GrowthFunction& f, std::vector<double> ts, const LegendreOptions& opt = {});

/// L_u(r) = sum_n l_u(n) r^n from a stored table.
class LFunctionEvaluator {
 public:
  /// `log_ell[n]` = log l_u(n). Truncation: the term ratio stays below 1/2
  /// for 5 consecutive terms and the geometric tail bound is below
  /// rel_tol times the partial sum.
  LFunctionEvaluator(std::string function_id, std::vector<double> log_ell, double rel_tol = 1e-17);
  explicit LFunctionEvaluator(const LegendreTable& table, double rel_tol = 1e-17);

  const std::string& function_id() const { return id_; }
  std::size_t n_max() const { return log_ell_.size() - 1; }
  const std::vector<double>& log_ell() const { return log_ell_; }
  double rel_tol() const { return rel_tol_; }

  struct Result {
    double log_value;
    std::size_t terms;
    double log_tail_bound;  // log of the geometric bound on the omitted tail
  };
  /// Throws InsufficientTableError when the rule does not fire by n_max.
  Result evaluate(double r) const;
  double log_L(double r) const { return evaluate(r).log_value; }

  /// Largest r at which evaluate() succeeds (bisection in log r).
  double max_certified_r() const;

 private:
  std::string id_;
  std::vector<double> log_ell_;
  double rel_tol_;
};

/// log L_u(r).
double l_function(const LFunctionEvaluator& ev, double r);

struct BidualResult {
  double log_value;  // sup_{0<=t<=t_cap} log l_u(t) + t log r
  double t_star;
  double log_u;      // direct log u(r), for comparison
  double abs_error() const { return log_value - log_u; }
};

/// Throws CapTooSmallError if the maximiser sits at t_cap.
BidualResult bidual(const GrowthFunction& f, double r, double t_cap, const LegendreOptions& opt = {});
BidualResult bidual(const GrowthFunctionSpec& spec, double r, double t_cap);

/// A t_cap comfortably above the elasticity r u'(r)/u(r).
double auto_t_cap(const GrowthFunction& f, double r);

}  // namespace hida
