#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hida/bell.hpp"
#include "hida/grid.hpp"
#include "json.hpp"

namespace hida {

enum class Condition { U0, U1, U2, U3, CPlusHalf, CPlusLog };

std::string to_string(Condition c);
Condition condition_from_string(const std::string& s);

/// u(r) = exp[(1+beta) r^{1/(1+beta)}], 0 <= beta < 1.
struct KondratievStreit {
  double beta;
};
/// g_k(r) = exp[2 sqrt(r log_{k-1} sqrt r)], k >= 2.
struct IteratedExpSqrt {
  int k;
};
/// u_k(r) = sum_n r^n / (b_k(n) n!).
struct BellSeries {
  int k;
};
/// u(r) = sum_n exp(log_coeffs[n]) r^n; -inf marks a zero coefficient.
/// Unless `polynomial` is set the list is a truncated series, valid only while
/// its last term is negligible.
struct PowerSeries {
  std::vector<double> log_coeffs;
  bool polynomial = false;
};
/// u(r) = e^{c r}.
struct Exponential {
  double c;
};

using GrowthKind = std::variant<KondratievStreit, IteratedExpSqrt, BellSeries, PowerSeries, Exponential>;

struct GrowthFunctionSpec {
  std::string id;
  GrowthKind kind;
  std::set<Condition> claimed;
};

/// Validated, evaluable growth function. Values are only ever exchanged as
/// log u(r); copies share the immutable coefficient tables.
class GrowthFunction {
 public:
  explicit GrowthFunction(GrowthFunctionSpec spec);

  double log_u(double r) const;
  /// exp(log_u(r)); throws ParameterError beyond domain_cap().
  double u(double r) const;

  const std::string& id() const { return spec_.id; }
  const GrowthFunctionSpec& spec() const { return spec_; }
  bool claims(Condition c) const { return spec_.claimed.count(c) > 0; }

  /// Largest r with log u(r) <= 700, i.e. where u(r) itself fits a double.
  double domain_cap() const { return domain_cap_; }
  /// Largest r at which the evaluator is accurate (truncated power series
  /// lose accuracy once their last term matters; closed forms never do).
  double validity_cap() const { return validity_cap_; }

  /// Infimum of log u over the default grid and where it is attained.
  double grid_inf_log_u() const { return inf_log_u_; }
  double grid_inf_r() const { return inf_r_; }

 private:
  double bell_log_u(double r) const;
  double power_series_log_u(double r) const;

  GrowthFunctionSpec spec_;
  std::shared_ptr<const ExpKCoefficients> bell_;
  double domain_cap_ = 0.0;
  double validity_cap_ = 0.0;
  double inf_log_u_ = 0.0;
  double inf_r_ = 0.0;
};

/// log u(r) for a spec; builds a GrowthFunction on each call.
double log_u(const GrowthFunctionSpec& spec, double r);

/// log_1(r) = log(max{e, r}), log_k = log_1 o log_{k-1}.
double iterated_log(int k, double r);

GrowthFunctionSpec kondratiev_streit(double beta);
GrowthFunctionSpec iterated_exp_sqrt(int k);
GrowthFunctionSpec bell_series(int k);
GrowthFunctionSpec exponential(double c);
GrowthFunctionSpec power_series(std::string id, std::vector<double> log_coeffs, bool polynomial = false);
/// e^{r^2} truncated after `terms` coefficients.
GrowthFunctionSpec exp_r_squared_series(int terms);

/// KS beta in {0, 0.5}, g_2, g_3 and the Bell series u_2.
std::vector<GrowthFunctionSpec> catalog();

GrowthFunctionSpec spec_from_json(const nlohmann::json& j, const std::string& id);
nlohmann::json to_json(const GrowthFunctionSpec& spec);

// ---- condition checks ------------------------------------------------------

enum class Status { Pass, Fail, Inconclusive };
std::string to_string(Status s);

struct ConditionEntry {
  Condition condition;
  Status status;
  double witness_r;
  std::string detail;
};

/// Grid certificates for (U0)-(U3), C_{+,1/2}, C_{+,log}. A pass means
/// "pass on grid", never a proof.
struct ConditionReport {
  std::string function_id;
  nlohmann::json grid;
  std::vector<ConditionEntry> entries;

  const ConditionEntry& at(Condition c) const;
  Status status(Condition c) const { return at(c).status; }
  /// Every claimed condition passed.
  bool claims_hold(const GrowthFunction& f) const;
  nlohmann::json to_json() const;
};

ConditionReport check_conditions(const GrowthFunction& f, const Grid& grid = default_r_grid());

}  // namespace hida
