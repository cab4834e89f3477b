#include "hida/fock.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "hida/errors.hpp"
#include "hida/numerics.hpp"

namespace hida {

using nlohmann::json;

void SequenceSpaceModel::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("SequenceSpaceModel: rho must lie in (0, 1)");
  if (d < 1) throw ParameterError("SequenceSpaceModel: d must be >= 1");
}

double SequenceSpaceModel::norm(const std::vector<double>& x, double p) const {
  validate();
  if (x.size() > static_cast<std::size_t>(d))
    throw ParameterError("SequenceSpaceModel::norm: vector longer than d = " + std::to_string(d));
  const double lr = std::log(rho);
  CompensatedSum<double> s;
  for (std::size_t k = 0; k < x.size(); ++k) s.add(std::exp(-2.0 * p * (k + 1.0) * lr) * x[k] * x[k]);
  return std::sqrt(s.value());
}

double SequenceSpaceModel::hs_norm_sq(double q, double p) const {
  validate();
  if (!(q > p)) throw ParameterError("hs_norm_sq: need q > p");
  const double r = std::pow(rho, 2.0 * (q - p));
  return r / (1.0 - r);
}

double SequenceSpaceModel::hs_norm_sq_direct(double q, double p) const {
  validate();
  if (!(q > p)) throw ParameterError("hs_norm_sq_direct: need q > p");
  CompensatedSum<double> s;
  for (int k = 0;; ++k) {
    const double term = std::pow(rho, 2.0 * (q - p) * (k + 1));
    s.add(term);
    if (term < 1e-18 * s.value()) break;
  }
  return s.value();
}

double SequenceSpaceModel::dual_weight(double p) const {
  validate();
  return std::pow(rho, 2.0 * p);
}

double ChaosSequence::log_abs(std::size_t n) const {
  if (n >= c.size()) return kNegInf;
  if (log_domain) return c[n];
  return c[n] == 0.0 ? kNegInf : std::log(std::abs(c[n]));
}

std::size_t ChaosSequence::degree() const {
  for (std::size_t n = c.size(); n-- > 0;)
    if (log_abs(n) > kNegInf) return n;
  return 0;
}

ChaosSequence ChaosSequence::delta(std::size_t n, std::size_t length) {
  ChaosSequence s;
  s.c.assign(std::max(length, n + 1), 0.0);
  s.c[n] = 1.0;
  return s;
}

ChaosSequence ChaosSequence::exponential_vector(double xi, std::size_t n_max) {
  if (!(xi >= 0.0)) throw ParameterError("exponential_vector: |xi| must be >= 0");
  ChaosSequence s;
  s.log_domain = true;
  const double lx = std::log(xi);
  for (std::size_t n = 0; n <= n_max; ++n)
    s.c.push_back(n == 0 ? 0.0 : n * lx - std::lgamma(n + 1.0));
  return s;
}

ChaosSequence ChaosSequence::from_json(const json& j) {
  ChaosSequence s;
  const json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("coefficients")) throw SchemaError("chaos sequence: missing \"coefficients\"");
    arr = &j.at("coefficients");
    s.level = j.value("level", 0.0);
    s.log_domain = j.value("log_domain", false);
  }
  if (!arr->is_array() || arr->empty()) throw SchemaError("chaos sequence: coefficients must be a non-empty array");
  for (const auto& v : *arr) {
    if (v.is_null() && s.log_domain)
      s.c.push_back(kNegInf);
    else if (v.is_number())
      s.c.push_back(v.get<double>());
    else
      throw SchemaError("chaos sequence: coefficients must be numbers");
  }
  return s;
}

json ChaosSequence::to_json() const {
  json arr = json::array();
  for (double v : c) arr.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  return {{"coefficients", arr}, {"level", level}, {"log_domain", log_domain}};
}

namespace {

void require_table(const ChaosSequence& seq, const LegendreTable& table, const char* who) {
  if (!table.is_integer_table()) throw ParameterError(std::string(who) + ": table must be indexed by t = 0, 1, ...");
  if (seq.size() > table.size())
    throw ParameterError(std::string(who) + ": table covers n <= " + std::to_string(table.size() - 1) +
                         " but the sequence has degree " + std::to_string(seq.size() - 1));
}

}  // namespace

double log_test_norm(const ChaosSequence& seq, const LegendreTable& table) {
  require_table(seq, table, "test_norm");
  LogSumExp s;
  for (std::size_t n = 0; n < seq.size(); ++n) s.add(2.0 * seq.log_abs(n) - table.log_ell_at(n));
  return 0.5 * s.value();
}

double test_norm(const ChaosSequence& seq, const LegendreTable& table) {
  return std::exp(log_test_norm(seq, table));
}

double log_dual_norm(const ChaosSequence& seq, const LegendreTable& table) {
  require_table(seq, table, "dual_norm");
  LogSumExp s;
  for (std::size_t n = 0; n < seq.size(); ++n)
    s.add(2.0 * (std::lgamma(n + 1.0) + seq.log_abs(n)) + table.log_ell_at(n));
  return 0.5 * s.value();
}

double dual_norm(const ChaosSequence& seq, const LegendreTable& table) {
  return std::exp(log_dual_norm(seq, table));
}

double exp_vector_norm(double xi, const LFunctionEvaluator& ev) {
  if (!(xi >= 0.0)) throw ParameterError("exp_vector_norm: |xi| must be >= 0");
  return std::exp(0.5 * ev.log_L(xi * xi));
}

PairingBound pairing_bound(const ChaosSequence& test, const ChaosSequence& dual, const LegendreTable& table) {
  if (test.size() != dual.size()) throw ParameterError("pairing_bound: sequences differ in length");
  if (test.level != dual.level) throw ParameterError("pairing_bound: sequences are at different levels");
  PairingBound out;
  LogSumExp s;
  for (std::size_t n = 0; n < test.size(); ++n) s.add(std::lgamma(n + 1.0) + test.log_abs(n) + dual.log_abs(n));
  const double log_pair = s.value();
  const double log_bound = log_test_norm(test, table) + log_dual_norm(dual, table);
  out.pairing = std::exp(log_pair);
  out.bound = std::exp(log_bound);
  out.holds = log_pair <= log_bound + kLogSlack;
  return out;
}

double hermite_eval_1d(const ChaosSequence& seq, double x) {
  if (seq.log_domain) throw ParameterError("hermite_eval_1d: needs signed coefficients, not logs");
  if (seq.c.empty()) return 0.0;
  // He_{n+1} = x He_n - n He_{n-1}
  double h0 = 1.0, h1 = x;
  CompensatedSum<double> s;
  s.add(seq.c[0]);
  for (std::size_t n = 1; n < seq.size(); ++n) {
    s.add(seq.c[n] * h1);
    const double h2 = x * h1 - static_cast<double>(n) * h0;
    h0 = h1;
    h1 = h2;
  }
  return s.value();
}

ANorm a_norm_1d(const ChaosSequence& seq, const GrowthFunction& f, double p, const Grid& x_grid,
                const SequenceSpaceModel& model) {
  if (x_grid.empty()) throw ParameterError("a_norm_1d: empty x-grid");
  if (!f.claims(Condition::U1))
    throw ParameterError("a_norm_1d: " + f.id() + " is not certified increasing with u(0) = 1");
  const double w = model.dual_weight(p);
  ANorm out;
  double best = kNegInf, x_max = 0.0;
  std::size_t skipped = 0;
  for (double x : x_grid.points) {
    const double arg = w * x * x;
    if (arg > f.validity_cap()) {
      ++skipped;
      continue;
    }
    x_max = std::max(x_max, std::abs(x));
    const double v = std::abs(hermite_eval_1d(seq, x));
    if (v == 0.0) continue;
    const double lv = std::log(v) - 0.5 * f.log_u(arg);
    if (lv > best) {
      best = lv;
      out.x_at = x;
    }
  }
  if (skipped)
    out.warnings.push_back(std::to_string(skipped) + " grid points beyond the validity range of " + f.id());
  out.value = std::exp(best);
  out.boundary = best > kNegInf && std::abs(out.x_at) >= x_max && x_max > 0.0;
  if (out.boundary) out.warnings.push_back("supremum attained at the grid boundary; enlarge the x-grid");
  return out;
}

VerificationReport growth_bound_check(const ChaosSequence& seq, const GrowthFunction& f, double p,
                                      const Grid& x_grid, const LegendreTable& table,
                                      const SequenceSpaceModel& model) {
  const ANorm an = a_norm_1d(seq, f, p, x_grid, model);
  const double log_tn = log_test_norm(seq, table);
  const double log_C = std::log(an.value) - log_tn;
  const double w = model.dual_weight(p);

  MarginTracker m;
  for (double x : x_grid.points) {
    const double arg = w * x * x;
    if (arg > f.validity_cap()) continue;
    const double v = std::abs(hermite_eval_1d(seq, x));
    if (v == 0.0) continue;
    m.add(log_C + log_tn + 0.5 * f.log_u(arg) - std::log(v), {{"x", x}});
  }
  VerificationReport rep;
  rep.check = "growth_bound";
  rep.function_id = f.id();
  rep.grid = x_grid.describe();
  rep.worst_margin = m.count() ? m.worst() : 0.0;
  rep.witness = {{"x", an.x_at}};
  rep.constants = {{"C", std::exp(log_C)}, {"a_norm", an.value}, {"test_norm", std::exp(log_tn)}, {"p", p}};
  rep.pass = std::isfinite(log_C) && !an.boundary && m.ok();
  for (const auto& w : an.warnings) rep.detail += (rep.detail.empty() ? "" : "; ") + w;
  return rep;
}

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1) throw ParameterError("gauss_hermite: order must be >= 1");
  // Jacobi matrix of the monic He_n: zero diagonal, off-diagonal sqrt(k).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigen solver failed");
  GaussHermiteRule rule;
  for (int i = 0; i < order; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    rule.weights.push_back(v * v);
  }
  return rule;
}

STransform s_transform_1d(const ChaosSequence& seq, double xi, int order) {
  STransform out;
  out.order = order;
  const auto rule = gauss_hermite(order);
  const std::size_t deg = seq.degree();
  out.exact = 2 * static_cast<std::size_t>(order) - 1 >= deg;
  if (!out.exact)
    out.warnings.push_back("quadrature order " + std::to_string(order) + " is not exact for degree " +
                           std::to_string(deg));
  CompensatedSum<double> s;
  for (int i = 0; i < order; ++i) s.add(rule.weights[i] * hermite_eval_1d(seq, rule.nodes[i] + xi));
  out.value = s.value();
  return out;
}

VerificationReport cauchy_coefficient_bound(const std::vector<double>& taylor, double K, double a,
                                            const GrowthFunction& f, const LegendreTable& table,
                                            const Grid& radius_grid) {
  if (!(K > 0.0)) throw ParameterError("cauchy_coefficient_bound: K must be > 0");
  if (!(a > 0.0)) throw ParameterError("cauchy_coefficient_bound: a must be > 0");
  if (taylor.empty()) throw ParameterError("cauchy_coefficient_bound: no Taylor coefficients");
  if (!table.is_integer_table() || table.size() < taylor.size())
    throw ParameterError("cauchy_coefficient_bound: table must cover n <= " + std::to_string(taylor.size() - 1));
  const double log_K = std::log(K);

  // Real coefficients: |F| is symmetric under conjugation, so half circles suffice.
  constexpr int kAngles = 256;
  const Grid radii = clip(radius_grid, 0.0, std::sqrt(f.validity_cap() / a));
  for (double R : radii.points) {
    double max_abs = 0.0;
    for (int j = 0; j <= kAngles; ++j) {
      const std::complex<double> z = std::polar(R, std::numbers::pi * j / kAngles);
      std::complex<double> acc = 0.0;
      for (std::size_t n = taylor.size(); n-- > 0;) acc = acc * z + taylor[n];
      max_abs = std::max(max_abs, std::abs(acc));
    }
    const double margin = log_K + 0.5 * f.log_u(a * R * R) - std::log(max_abs);
    if (margin < -kLogSlack)
      throw HypothesisViolatedError("cauchy_coefficient_bound: |F(xi)| <= K u(a|xi|^2)^{1/2} fails at |xi| = " +
                                        std::to_string(R),
                                    R, margin);
  }

  MarginTracker m;
  for (std::size_t n = 0; n < taylor.size(); ++n) {
    if (taylor[n] == 0.0) continue;
    m.add(2.0 * log_K + n * std::log(a) + table.log_ell_at(n) - 2.0 * std::log(std::abs(taylor[n])), {{"n", n}});
  }
  VerificationReport rep;
  rep.check = "cauchy_coefficient_bound";
  rep.function_id = f.id();
  rep.grid = {{"radius", radii.describe()}, {"n_max", taylor.size() - 1}};
  rep.worst_margin = m.count() ? m.worst() : 0.0;
  rep.witness = m.witness();
  rep.constants = {{"K", K}, {"a", a}};
  rep.pass = m.ok();
  return rep;
}

}  // namespace hida
