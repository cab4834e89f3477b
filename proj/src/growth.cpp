#include "hida/growth.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hida/errors.hpp"
#include "hida/numerics.hpp"

namespace hida {

namespace {

std::string fmt_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const GrowthFunctionSpec& s) {
  std::visit(Overloaded{
                 [](const KondratievStreit& k) {
                   if (!(k.beta >= 0.0 && k.beta < 1.0))
                     throw ParameterError("kondratiev_streit: beta must lie in [0, 1)");
                 },
                 [](const IteratedExpSqrt& g) {
                   if (g.k < 2) throw ParameterError("iterated_exp_sqrt: k must be >= 2");
                 },
                 [](const BellSeries& b) {
                   if (b.k < 1) throw ParameterError("bell_series: k must be >= 1");
                 },
                 [](const PowerSeries& p) {
                   if (p.log_coeffs.empty()) throw ParameterError("power_series: no coefficients");
                   for (double a : p.log_coeffs)
                     if (std::isnan(a) || a == kInf)
                       throw ParameterError("power_series: coefficients must be finite or -inf");
                   if (std::none_of(p.log_coeffs.begin(), p.log_coeffs.end(),
                                    [](double a) { return std::isfinite(a); }))
                     throw ParameterError("power_series: all coefficients are zero");
                 },
                 [](const Exponential& e) {
                   if (!(e.c > 0.0) || !std::isfinite(e.c))
                     throw ParameterError("exponential: c must be positive");
                 },
             },
             s.kind);
}

constexpr double kScanDrop = 40.0;  // terms below max - 40 are dropped (e^-40 ~ 4e-18)

}  // namespace

std::string to_string(Condition c) {
  switch (c) {
    case Condition::U0: return "U0";
    case Condition::U1: return "U1";
    case Condition::U2: return "U2";
    case Condition::U3: return "U3";
    case Condition::CPlusHalf: return "C+1/2";
    case Condition::CPlusLog: return "C+log";
  }
  return "?";
}

Condition condition_from_string(const std::string& s) {
  for (Condition c : {Condition::U0, Condition::U1, Condition::U2, Condition::U3, Condition::CPlusHalf,
                      Condition::CPlusLog})
    if (to_string(c) == s) return c;
  throw ParameterError("unknown condition '" + s + "'");
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

double iterated_log(int k, double r) {
  if (k < 1) throw ParameterError("iterated_log: k must be >= 1");
  double v = r;
  for (int i = 0; i < k; ++i) v = std::log(std::max(std::numbers::e, v));
  return v;
}

GrowthFunction::GrowthFunction(GrowthFunctionSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  if (const auto* b = std::get_if<BellSeries>(&spec_.kind)) bell_ = ExpKCoefficients::get(b->k);

  validity_cap_ = kInf;
  if (const auto* p = std::get_if<PowerSeries>(&spec_.kind); p && !p->polynomial) {
    std::size_t top = p->log_coeffs.size() - 1;
    while (!std::isfinite(p->log_coeffs[top])) --top;
    if (top > 0) {
      // The truncation is harmless while the last retained term is < 1e-16 of the sum.
      const double thresh = std::log(1e-16);
      auto share = [&](double lr) { return p->log_coeffs[top] + top * lr - power_series_log_u(std::exp(lr)); };
      double lo = -700.0 / top, hi = 700.0;
      if (share(lo) > thresh) {
        validity_cap_ = 0.0;
      } else {
        for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
          const double mid = 0.5 * (lo + hi);
          (share(mid) <= thresh ? lo : hi) = mid;
        }
        validity_cap_ = std::exp(lo);
      }
    }
  }

  if (log_u(0.0) > 700.0) {
    domain_cap_ = 0.0;
  } else {
    double lo = -700.0, hi = std::min(700.0, std::log(std::min(validity_cap_, 1e300)));
    if (log_u(std::exp(hi)) <= 700.0) {
      domain_cap_ = std::exp(hi);
    } else {
      for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        (log_u(std::exp(mid)) <= 700.0 ? lo : hi) = mid;
      }
      domain_cap_ = std::exp(lo);
    }
  }

  const Grid g = clip(default_r_grid(), 0.0, validity_cap_);
  inf_log_u_ = kInf;
  for (double r : g.points) {
    const double v = log_u(r);
    if (v < inf_log_u_) {
      inf_log_u_ = v;
      inf_r_ = r;
    }
  }
}

double GrowthFunction::u(double r) const {
  const double v = log_u(r);
  if (v > 700.0) throw ParameterError("u(r) overflows a double here; use log_u");
  return std::exp(v);
}

double GrowthFunction::log_u(double r) const {
  if (!(r >= 0.0)) throw ParameterError("growth function evaluated at negative or NaN r");
  return std::visit(Overloaded{
                        [&](const KondratievStreit& k) {
                          return (1.0 + k.beta) * std::pow(r, 1.0 / (1.0 + k.beta));
                        },
                        [&](const IteratedExpSqrt& g) {
                          return 2.0 * std::sqrt(r * iterated_log(g.k - 1, std::sqrt(r)));
                        },
                        [&](const BellSeries&) { return bell_log_u(r); },
                        [&](const PowerSeries&) { return power_series_log_u(r); },
                        [&](const Exponential& e) { return e.c * r; },
                    },
                    spec_.kind);
}

double GrowthFunction::power_series_log_u(double r) const {
  const auto& a = std::get<PowerSeries>(spec_.kind).log_coeffs;
  if (r == 0.0) return a[0];
  const double lr = std::log(r);
  LogSumExp acc;
  for (std::size_t n = 0; n < a.size(); ++n) acc.add(a[n] + static_cast<double>(n) * lr);
  return acc.value();
}

// u_k(r) = sum_n exp(tau(n)), tau(n) = n log r - 2 log n! - log [z^n] exp_k(z).
// tau is concave in n, so we locate its peak and sum outward until terms drop
// 40 nats below the running maximum. Far out the peak is wide and a lattice
// with spacing sigma/8 replaces unit steps (the summand is smooth in n).
double GrowthFunction::bell_log_u(double r) const {
  if (r == 0.0) return 0.0;
  const ExpKCoefficients& C = *bell_;
  const double lr = std::log(r);
  const int N = C.table_size();
  auto tau_int = [&](long long n) {
    return static_cast<double>(n) * lr - 2.0 * std::lgamma(static_cast<double>(n) + 1.0) -
           C.log_coeff(static_cast<int>(n));
  };
  double x_hint = std::numeric_limits<double>::quiet_NaN();
  auto tau_real = [&](double n) {
    return n * lr - 2.0 * std::lgamma(n + 1.0) - C.log_coeff_real(n, &x_hint);
  };

  // Far out, |tau| is so large that a 40-nat drop is below double resolution;
  // the window is then capped at 25 standard deviations of the peak.
  auto scan = [&](long long n0, long long max_steps, auto&& tau) {
    LogSumExp acc;
    for (long long n = n0; n <= n0 + max_steps; ++n) {
      const double v = tau(n);
      acc.add(v);
      if (n > n0 && v < acc.max_term() - kScanDrop) break;
    }
    for (long long n = n0 - 1; n >= 0 && n >= n0 - max_steps; --n) {
      const double v = tau(n);
      acc.add(v);
      if (v < acc.max_term() - kScanDrop) break;
    }
    return acc.value();
  };

  if (tau_int(N) - tau_int(N - 1) <= 0.0) {
    long long lo = 0, hi = N;  // first n with tau(n+1) - tau(n) <= 0
    while (lo < hi) {
      const long long mid = (lo + hi) / 2;
      if (tau_int(mid + 1) - tau_int(mid) <= 0.0)
        hi = mid;
      else
        lo = mid + 1;
    }
    return scan(lo, 4LL * N, [&](long long n) { return n <= N ? tau_int(n) : tau_real(static_cast<double>(n)); });
  }

  // Peak beyond the table: tau'(n) = log r - 2 psi(n+1) + x(n) = 0.
  auto slope = [&](double n) { return lr - 2.0 * boost::math::digamma(n + 1.0) + C.saddle_x(n); };
  double lo = N, hi = 2.0 * N;
  while (slope(hi) > 0.0 && hi < 1e300) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > std::max(0.5, 1e-14 * hi); ++i) {
    const double geo = std::sqrt(lo) * std::sqrt(hi);
    const double mid = geo > lo + 1 ? geo : 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  const double n_star = 0.5 * (lo + hi);
  const double var = 1.0 / (2.0 * boost::math::trigamma(n_star + 1.0) - 1.0 / C.saddle_psi2(n_star));
  const double sigma = std::sqrt(std::max(var, 1.0));

  if (sigma < 64.0) {
    const auto n0 = static_cast<long long>(std::llround(n_star));
    return scan(n0, 25 * 64, [&](long long n) { return n <= N ? tau_int(n) : tau_real(static_cast<double>(n)); });
  }

  // Lattice trapezoid; the sum stays on integer n.
  const double h = std::floor(sigma / 8.0);
  const double n0 = std::round(n_star);
  LogSumExp acc;
  constexpr double kMaxSteps = 25.0 * 8.0;
  for (double m = 0; m <= kMaxSteps; ++m) {
    const double v = tau_real(n0 + m * h);
    acc.add(v);
    if (m > 0 && v < acc.max_term() - kScanDrop) break;
  }
  for (double m = -1; m >= -kMaxSteps; --m) {
    const double n = n0 + m * h;
    if (n < 0) break;
    const double v = n <= N ? tau_int(static_cast<long long>(n)) : tau_real(n);
    acc.add(v);
    if (v < acc.max_term() - kScanDrop) break;
  }
  return acc.value() + std::log(h);
}

double log_u(const GrowthFunctionSpec& spec, double r) { return GrowthFunction(spec).log_u(r); }

GrowthFunctionSpec kondratiev_streit(double beta) {
  return {"ks_beta" + fmt_param(beta), KondratievStreit{beta}, {Condition::U0, Condition::U1, Condition::U2, Condition::U3}};
}

GrowthFunctionSpec iterated_exp_sqrt(int k) {
  return {"g" + std::to_string(k), IteratedExpSqrt{k}, {Condition::U0, Condition::U1, Condition::U2, Condition::U3}};
}

GrowthFunctionSpec bell_series(int k) {
  return {"bell" + std::to_string(k), BellSeries{k}, {Condition::U0, Condition::U1, Condition::U2, Condition::U3}};
}

GrowthFunctionSpec exponential(double c) {
  return {"exp_c" + fmt_param(c), Exponential{c}, {Condition::U0, Condition::U1, Condition::U2, Condition::U3}};
}

GrowthFunctionSpec power_series(std::string id, std::vector<double> log_coeffs, bool polynomial) {
  return {std::move(id), PowerSeries{std::move(log_coeffs), polynomial}, {}};
}

GrowthFunctionSpec exp_r_squared_series(int terms) {
  if (terms < 1) throw ParameterError("exp_r_squared_series: terms must be >= 1");
  std::vector<double> a(static_cast<std::size_t>(terms), kNegInf);
  for (int n = 0; n < terms; n += 2) a[static_cast<std::size_t>(n)] = -std::lgamma(n / 2 + 1.0);
  return power_series("exp_r2", std::move(a));
}

std::vector<GrowthFunctionSpec> catalog() {
  return {kondratiev_streit(0.0), kondratiev_streit(0.5), iterated_exp_sqrt(2), iterated_exp_sqrt(3),
          bell_series(2)};
}

GrowthFunctionSpec spec_from_json(const nlohmann::json& j, const std::string& id) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("function '" + id + "': expected an object with a string 'kind'");
  const std::string kind = j["kind"];
  auto num = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number())
      throw SchemaError("function '" + id + "': missing numeric '" + key + "'");
    return j[key].get<double>();
  };
  auto integer = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
      throw SchemaError("function '" + id + "': missing integer '" + key + "'");
    return j[key].get<int>();
  };
  GrowthFunctionSpec s;
  if (kind == "kondratiev_streit")
    s = kondratiev_streit(num("beta"));
  else if (kind == "iterated_exp_sqrt")
    s = iterated_exp_sqrt(integer("k"));
  else if (kind == "bell_series")
    s = bell_series(integer("k"));
  else if (kind == "exponential")
    s = exponential(num("c"));
  else if (kind == "power_series") {
    if (!j.contains("log_coeffs") || !j["log_coeffs"].is_array())
      throw SchemaError("function '" + id + "': missing array 'log_coeffs'");
    std::vector<double> a;
    for (const auto& v : j["log_coeffs"]) {
      if (v.is_null())
        a.push_back(kNegInf);
      else if (v.is_number())
        a.push_back(v.get<double>());
      else
        throw SchemaError("function '" + id + "': log_coeffs entries must be numbers or null");
    }
    bool poly = false;
    if (j.contains("polynomial")) {
      if (!j["polynomial"].is_boolean()) throw SchemaError("function '" + id + "': 'polynomial' must be a boolean");
      poly = j["polynomial"].get<bool>();
    }
    s = power_series(id, std::move(a), poly);
  } else {
    throw SchemaError("function '" + id + "': unknown kind '" + kind + "'");
  }
  s.id = id;
  if (j.contains("claims")) {
    if (!j["claims"].is_array()) throw SchemaError("function '" + id + "': 'claims' must be an array");
    s.claimed.clear();
    for (const auto& c : j["claims"]) {
      try {
        s.claimed.insert(condition_from_string(c.get<std::string>()));
      } catch (const std::exception& e) {
        throw SchemaError("function '" + id + "': " + e.what());
      }
    }
  }
  validate(s);
  return s;
}

nlohmann::json to_json(const GrowthFunctionSpec& spec) {
  nlohmann::json j = std::visit(
      Overloaded{
          [](const KondratievStreit& k) { return nlohmann::json{{"kind", "kondratiev_streit"}, {"beta", k.beta}}; },
          [](const IteratedExpSqrt& g) { return nlohmann::json{{"kind", "iterated_exp_sqrt"}, {"k", g.k}}; },
          [](const BellSeries& b) { return nlohmann::json{{"kind", "bell_series"}, {"k", b.k}}; },
          [](const PowerSeries& p) {
            nlohmann::json a = nlohmann::json::array();
            for (double v : p.log_coeffs) a.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
            return nlohmann::json{{"kind", "power_series"}, {"log_coeffs", a}, {"polynomial", p.polynomial}};
          },
          [](const Exponential& e) { return nlohmann::json{{"kind", "exponential"}, {"c", e.c}}; },
      },
      spec.kind);
  nlohmann::json claims = nlohmann::json::array();
  for (Condition c : spec.claimed) claims.push_back(to_string(c));
  j["claims"] = claims;
  return j;
}

// ---- condition checks ------------------------------------------------------

const ConditionEntry& ConditionReport::at(Condition c) const {
  for (const auto& e : entries)
    if (e.condition == c) return e;
  throw ParameterError("condition not in report");
}

bool ConditionReport::claims_hold(const GrowthFunction& f) const {
  for (Condition c : f.spec().claimed)
    if (status(c) != Status::Pass) return false;
  return true;
}

nlohmann::json ConditionReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json j{{"condition", to_string(e.condition)},
                     {"status", to_string(e.status)},
                     {"witness_r", e.witness_r},
                     {"grid", grid},
                     {"detail", e.detail}};
    if (e.status == Status::Pass) j["certificate"] = "pass on grid (sampled, not a proof)";
    arr.push_back(j);
  }
  return {{"function", function_id}, {"conditions", arr}};
}

namespace {

// Index of the grid point closest to (and not above) `r`.
std::size_t index_at_or_below(const std::vector<double>& pts, double r) {
  auto it = std::upper_bound(pts.begin(), pts.end(), r);
  return it == pts.begin() ? 0 : static_cast<std::size_t>(it - pts.begin()) - 1;
}

// Divergence of h over the final two decades of the grid.
ConditionEntry divergence_check(Condition c, const std::vector<double>& r, const std::vector<double>& h,
                                double r_floor) {
  const double top = r.back();
  if (top < 100.0 * r_floor) return {c, Status::Inconclusive, top, "grid spans fewer than two decades above " + fmt_param(r_floor)};
  const std::size_t i2 = r.size() - 1, i1 = index_at_or_below(r, top / 10.0), i0 = index_at_or_below(r, top / 100.0);
  const double d1 = h[i1] - h[i0], d2 = h[i2] - h[i1];
  if (h[i2] < h[i1]) return {c, Status::Fail, top, "ratio decreases over the final decade"};
  if (d1 > 0.0 && d2 > 0.0) return {c, Status::Pass, top, "ratio still increasing over the final two decades"};
  return {c, Status::Inconclusive, top, "ratio flat over the sampled range"};
}

}  // namespace

ConditionReport check_conditions(const GrowthFunction& f, const Grid& grid) {
  if (grid.empty()) throw ParameterError("check_conditions: empty grid");
  const Grid g = clip(grid, 0.0, f.validity_cap());
  if (g.empty()) throw ParameterError("check_conditions: grid lies beyond the evaluator's validity cap");
  const auto& r = g.points;
  std::vector<double> lu(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) lu[i] = f.log_u(r[i]);

  ConditionReport rep;
  rep.function_id = f.id();
  rep.grid = g.describe();
  constexpr double kTol = 1e-12;

  // U0
  const auto imin = static_cast<std::size_t>(std::min_element(lu.begin(), lu.end()) - lu.begin());
  if (std::abs(lu[imin]) <= kTol)
    rep.entries.push_back({Condition::U0, Status::Pass, r[imin], "min log u = " + fmt_param(lu[imin])});
  else
    rep.entries.push_back({Condition::U0, Status::Fail, r[imin], "grid infimum of u is exp(" + fmt_param(lu[imin]) + ")"});

  // U1
  {
    ConditionEntry e{Condition::U1, Status::Pass, 0.0, "u(0) = 1 and nondecreasing on grid"};
    if (r.front() != 0.0) {
      e = {Condition::U1, Status::Inconclusive, r.front(), "grid does not contain r = 0"};
    } else if (std::abs(lu[0]) > kTol) {
      e = {Condition::U1, Status::Fail, 0.0, "u(0) = exp(" + fmt_param(lu[0]) + ")"};
    } else {
      for (std::size_t i = 1; i < r.size(); ++i)
        if (lu[i] < lu[i - 1] - kTol * std::max(1.0, std::abs(lu[i]))) {
          e = {Condition::U1, Status::Fail, r[i], "u decreases between grid points"};
          break;
        }
    }
    if (e.status == Status::Pass && rep.entries[0].status != Status::Pass)
      e = {Condition::U1, Status::Fail, rep.entries[0].witness_r, "U0 fails"};
    rep.entries.push_back(e);
  }

  // U2: r^{-1} log u(r) over the final decade (or from r = 1 on short grids).
  {
    const double top = r.back();
    if (top < 5.0) {
      rep.entries.push_back({Condition::U2, Status::Inconclusive, top, "grid ends below r = 5"});
    } else {
      const std::size_t i1 = r.size() - 1, i0 = index_at_or_below(r, std::max(1.0, top / 10.0));
      const double q1 = lu[i1] / r[i1], q0 = lu[i0] / r[i0];
      if (q1 <= q0 * (1.0 + 1e-9) + 1e-300)
        rep.entries.push_back({Condition::U2, Status::Pass, top, "log u(r)/r nonincreasing over the final decade, max " + fmt_param(q0)});
      else if (q1 >= 2.0 * q0)
        rep.entries.push_back({Condition::U2, Status::Fail, top, "log u(r)/r grew from " + fmt_param(q0) + " to " + fmt_param(q1)});
      else
        rep.entries.push_back({Condition::U2, Status::Inconclusive, top, "log u(r)/r slowly increasing"});
    }
  }

  // U3: midpoint convexity of x -> log u(x^2) on adjacent triples.
  {
    ConditionEntry e{Condition::U3, Status::Pass, r.front(), "convex on all adjacent triples"};
    double worst = kInf;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      const double x0 = std::sqrt(r[i - 1]), x1 = std::sqrt(r[i]), x2 = std::sqrt(r[i + 1]);
      const double chord = lu[i - 1] + (lu[i + 1] - lu[i - 1]) * (x1 - x0) / (x2 - x0);
      const double margin = chord - lu[i];
      const double tol = 1e-10 * std::max({1.0, std::abs(lu[i - 1]), std::abs(lu[i + 1])});
      if (margin / tol < worst) {
        worst = margin / tol;
        e.witness_r = r[i];
      }
      if (margin < -tol) {
        e.status = Status::Fail;
        e.detail = "chord below log u(x^2) by " + fmt_param(-margin);
        break;
      }
    }
    if (r.size() < 3) e = {Condition::U3, Status::Inconclusive, r.front(), "fewer than three grid points"};
    rep.entries.push_back(e);
  }

  // C_{+,1/2} and C_{+,log}
  {
    std::vector<double> rr, hh;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] > 0.0) {
        rr.push_back(r[i]);
        hh.push_back(lu[i] / std::sqrt(r[i]));
      }
    rep.entries.push_back(rr.empty() ? ConditionEntry{Condition::CPlusHalf, Status::Inconclusive, 0.0, "no positive points"}
                                     : divergence_check(Condition::CPlusHalf, rr, hh, 1.0));
    rr.clear();
    hh.clear();
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] > 1.0) {
        rr.push_back(r[i]);
        hh.push_back(lu[i] / std::log(r[i]));
      }
    rep.entries.push_back(rr.empty() ? ConditionEntry{Condition::CPlusLog, Status::Inconclusive, 0.0, "no points above 1"}
                                     : divergence_check(Condition::CPlusLog, rr, hh, 10.0));
  }
  return rep;
}

}  // namespace hida
