#include "hida/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hida/errors.hpp"
#include "hida/numerics.hpp"

namespace hida {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LegendrePoint legendre_transform(const GrowthFunction& f, double t, const LegendreOptions& opt,
                                 std::optional<double> s_left) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("legendre_transform: t must be finite and >= 0");
  if (t == 0.0) return {0.0, f.grid_inf_log_u(), f.grid_inf_r()};

  const double s_max = std::min(opt.s_bound, std::log(std::min(f.validity_cap(), 1e300)));
  auto phi = [&](double s) { return f.log_u(std::exp(s)) - t * s; };
  // phi is convex in s: an end is outside the minimiser when phi rises outward.
  auto left_ok = [&](double a) {
    const double h = 1e-3 * std::max(1.0, std::abs(a));
    return phi(a) > phi(a + h);
  };
  auto right_ok = [&](double b) {
    const double h = 1e-3 * std::max(1.0, std::abs(b));
    return phi(b) > phi(b - h);
  };

  double a = s_left ? *s_left : -opt.s_start;
  double b = std::min(std::max(opt.s_start, a + 1.0), s_max);
  if (!(a < b)) throw UnboundedBelowError("legendre_transform: empty search interval");
  while (!left_ok(a)) {
    if (a <= -opt.s_bound) throw UnboundedBelowError("legendre_transform: no left bracket above s = -" + g17(opt.s_bound));
    a = std::max(a > -1.0 ? -2.0 : 2.0 * a, -opt.s_bound);
  }
  while (!right_ok(b)) {
    if (b >= s_max)
      throw UnboundedBelowError("legendre_transform: phi still decreasing at s = " + g17(s_max) + " (t = " + g17(t) + ")");
    b = std::min(b < 1.0 ? 2.0 : 2.0 * b, s_max);
  }
  const ScalarMinimum m = golden_section_minimize(phi, a, b, opt.tol, opt.max_iter);
  return {t, m.fx, std::exp(m.x)};
}

LegendrePoint legendre_transform(const GrowthFunctionSpec& spec, double t) {
  return legendre_transform(GrowthFunction(spec), t);
}

LegendreTable::LegendreTable(std::string function_id, std::vector<LegendrePoint> points, double tol)
    : id_(std::move(function_id)), points_(std::move(points)), tol_(tol) {}

std::vector<double> LegendreTable::log_ell() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.log_ell);
  return out;
}

bool LegendreTable::is_integer_table() const {
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (points_[i].t != static_cast<double>(i)) return false;
  return true;
}

double LegendreTable::log_ell_at(std::size_t n) const {
  if (n >= points_.size() || points_[n].t != static_cast<double>(n))
    throw ParameterError("LegendreTable: no integer entry " + std::to_string(n));
  return points_[n].log_ell;
}

LegendreTable LegendreTable::with_log_ell(std::size_t i, double value) const {
  LegendreTable copy = *this;
  copy.points_.at(i).log_ell = value;
  return copy;
}

std::string LegendreTable::to_csv() const {
  std::ostringstream os;
  os << "t,log_ell,r_star\n";
  for (const auto& p : points_) os << g17(p.t) << ',' << g17(p.log_ell) << ',' << g17(p.r_star) << '\n';
  return os.str();
}

nlohmann::json LegendreTable::to_json() const {
  nlohmann::json t = nlohmann::json::array(), l = nlohmann::json::array(), r = nlohmann::json::array();
  for (const auto& p : points_) {
    t.push_back(p.t);
    l.push_back(p.log_ell);
    r.push_back(p.r_star);
  }
  return {{"function", id_}, {"tol", tol_}, {"t", t}, {"log_ell", l}, {"r_star", r}};
}

LegendreTable legendre_on_grid(const GrowthFunction& f, std::vector<double> ts, const LegendreOptions& opt) {
  std::sort(ts.begin(), ts.end());
  std::vector<LegendrePoint> pts;
  pts.reserve(ts.size());
  std::optional<double> s_left;
  for (double t : ts) {
    pts.push_back(legendre_transform(f, t, opt, s_left));
    // r* is nondecreasing in t, so the previous minimiser brackets from the left.
    if (t > 0.0) s_left = std::log(pts.back().r_star) - 1e-9;
  }
  return LegendreTable(f.id(), std::move(pts), opt.tol);
}

LegendreTable legendre_sequence(const GrowthFunction& f, int n_max, const LegendreOptions& opt) {
  if (n_max < 0) throw ParameterError("legendre_sequence: n_max must be >= 0");
  std::vector<double> ts(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) ts[static_cast<std::size_t>(n)] = n;
  return legendre_on_grid(f, std::move(ts), opt);
}

LegendreTable legendre_sequence(const GrowthFunctionSpec& spec, int n_max) {
  return legendre_sequence(GrowthFunction(spec), n_max);
}

// ---- L-function ------------------------------------------------------------

LFunctionEvaluator::LFunctionEvaluator(std::string function_id, std::vector<double> log_ell, double rel_tol)
    : id_(std::move(function_id)), log_ell_(std::move(log_ell)), rel_tol_(rel_tol) {
  if (log_ell_.empty()) throw ParameterError("LFunctionEvaluator: empty table");
  if (!(rel_tol_ > 0.0)) throw ParameterError("LFunctionEvaluator: rel_tol must be > 0");
}

LFunctionEvaluator::LFunctionEvaluator(const LegendreTable& table, double rel_tol)
    : LFunctionEvaluator(table.function_id(), [&] {
        if (!table.is_integer_table()) throw ParameterError("LFunctionEvaluator: table must be indexed by t = 0, 1, 2, ...");
        return table.log_ell();
      }(), rel_tol) {}

LFunctionEvaluator::Result LFunctionEvaluator::evaluate(double r) const {
  if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("l_function: r must be finite and >= 0");
  if (r == 0.0) return {log_ell_[0], 1, kNegInf};
  const double lr = std::log(r);
  const double log_half = std::log(0.5), log_tol = std::log(rel_tol_);
  LogSumExp acc;
  double prev = log_ell_[0];
  acc.add(prev);
  int run = 0;
  double last_log_ratio = kNegInf;
  for (std::size_t n = 1; n < log_ell_.size(); ++n) {
    const double term = log_ell_[n] + static_cast<double>(n) * lr;
    acc.add(term);
    last_log_ratio = term - prev;
    prev = term;
    run = last_log_ratio < log_half ? run + 1 : 0;
    if (run >= 5) {
      // Ratios only shrink (l_u is log-concave), so the tail is at most
      // term * q / (1 - q) with q the current ratio.
      const double q = std::exp(last_log_ratio);
      const double log_tail = term + last_log_ratio - std::log1p(-q);
      if (log_tail < acc.value() + log_tol) return {acc.value(), n + 1, log_tail};
    }
  }
  throw InsufficientTableError("l_function: truncation rule not met by n_max = " + std::to_string(n_max()) +
                                   " at r = " + g17(r),
                               std::exp(last_log_ratio), n_max());
}

double LFunctionEvaluator::max_certified_r() const {
  auto ok = [&](double lr) {
    try {
      evaluate(std::exp(lr));
      return true;
    } catch (const InsufficientTableError&) {
      return false;
    }
  };
  double lo = -50.0, hi = 50.0;
  if (!ok(lo)) return 0.0;
  while (ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 700.0) return std::exp(lo);
  }
  for (int i = 0; i < 100 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return std::exp(lo);
}

double l_function(const LFunctionEvaluator& ev, double r) { return ev.log_L(r); }

// ---- bidual ----------------------------------------------------------------

double auto_t_cap(const GrowthFunction& f, double r) {
  if (r <= 0.0) return 10.0;
  const double h = 1e-4;
  const double el = (f.log_u(r * std::exp(h)) - f.log_u(r * std::exp(-h))) / (2.0 * h);
  return std::max(10.0, 4.0 * el + 10.0);
}

BidualResult bidual(const GrowthFunction& f, double r, double t_cap, const LegendreOptions& opt) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("bidual: r must be finite and >= 0");
  if (!(t_cap > 0.0)) throw ParameterError("bidual: t_cap must be > 0");
  const double direct = f.log_u(r);
  const double h0 = legendre_transform(f, 0.0, opt).log_ell;
  if (r == 0.0) return {h0, 0.0, direct};
  const double lr = std::log(r);
  auto neg_h = [&](double t) { return -(legendre_transform(f, t, opt).log_ell + t * lr); };
  const double tol = 1e-9 * std::max(1.0, t_cap);
  const ScalarMinimum m = golden_section_minimize(neg_h, 0.0, t_cap, tol, opt.max_iter);
  if (m.x >= t_cap - 10.0 * tol)
    throw CapTooSmallError("bidual: maximiser at t_cap = " + g17(t_cap) + " for r = " + g17(r), t_cap);
  if (h0 >= -m.fx) return {h0, 0.0, direct};
  return {-m.fx, m.x, direct};
}

BidualResult bidual(const GrowthFunctionSpec& spec, double r, double t_cap) {
  return bidual(GrowthFunction(spec), r, t_cap);
}

}  // namespace hida
