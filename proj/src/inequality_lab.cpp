#include "hida/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hida/errors.hpp"
#include "hida/numerics.hpp"

namespace hida {

namespace {

using nlohmann::json;

VerificationReport finish(std::string check, std::string fid, json grid, const MarginTracker& m) {
  VerificationReport r;
  r.check = std::move(check);
  r.function_id = std::move(fid);
  r.grid = std::move(grid);
  r.worst_margin = m.count() ? m.worst() : 0.0;
  r.witness = m.witness();
  r.pass = m.ok();
  if (m.count() == 0) r.detail = "no comparisons executed";
  return r;
}

void require_integer_table(const LegendreTable& t, std::size_t min_size, const char* who) {
  if (!t.is_integer_table()) throw ParameterError(std::string(who) + ": table must be indexed by t = 0, 1, 2, ...");
  if (t.size() < min_size)
    throw ParameterError(std::string(who) + ": table needs at least " + std::to_string(min_size) + " entries");
}

json range_json(double lo, double hi, std::size_t n) { return {{"min", lo}, {"max", hi}, {"size", n}}; }

// Number of trailing points examined by the tail rule.
std::size_t tail_length(std::size_t n) { return std::max<std::size_t>(3, (n + 9) / 10); }

}  // namespace

VerificationReport check_log_concavity(const LegendreTable& table) {
  require_integer_table(table, 3, "check_log_concavity");
  MarginTracker m;
  for (std::size_t n = 0; n + 2 < table.size(); ++n)
    m.add_lazy(2.0 * table.log_ell_at(n + 1) - table.log_ell_at(n) - table.log_ell_at(n + 2),
               [&] { return json{{"n", n}}; });
  return finish("log_concavity", table.function_id(), {{"n_max", table.size() - 1}}, m);
}

namespace {

template <class Margin>
VerificationReport pair_check(const char* check, const LegendreTable& table, int pair_max, Margin margin) {
  require_integer_table(table, 2, check);
  if (pair_max < 0) throw ParameterError(std::string(check) + ": pair_max must be >= 0");
  const auto top = static_cast<int>(table.size()) - 1;
  MarginTracker m;
  for (int n = 0; n <= pair_max; ++n)
    for (int k = n; k <= pair_max && n + k <= top; ++k)
      m.add_lazy(margin(n, k), [&] { return json{{"n", n}, {"m", k}}; });
  return finish(check, table.function_id(), {{"pair_max", pair_max}, {"n_max", top}}, m);
}

}  // namespace

VerificationReport check_submultiplicativity(const LegendreTable& table, int pair_max) {
  return pair_check("submultiplicativity", table, pair_max, [&](int n, int k) {
    return table.log_ell_at(n) + table.log_ell_at(k) - table.log_ell_at(0) - table.log_ell_at(n + k);
  });
}

VerificationReport check_supermultiplicativity(const LegendreTable& table, int pair_max) {
  return pair_check("supermultiplicativity", table, pair_max, [&](int n, int k) {
    return table.log_ell_at(0) + 2.0 * (n + k) * std::numbers::ln2 + table.log_ell_at(n + k) -
           table.log_ell_at(n) - table.log_ell_at(k);
  });
}

VerificationReport check_t2t_logconvex(const LegendreTable& table) {
  const auto& p = table.points();
  if (p.size() < 3) throw ParameterError("check_t2t_logconvex: need at least three t values");
  auto g = [&](std::size_t i) {
    const double t = p[i].t;
    return p[i].log_ell + (t > 0.0 ? 2.0 * t * std::log(t) : 0.0);
  };
  MarginTracker m;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double t0 = p[i - 1].t, t1 = p[i].t, t2 = p[i + 1].t;
    if (!(t0 < t1 && t1 < t2)) throw ParameterError("check_t2t_logconvex: t values must be strictly increasing");
    const double chord = g(i - 1) + (g(i + 1) - g(i - 1)) * (t1 - t0) / (t2 - t0);
    m.add(chord - g(i), {{"t", json::array({t0, t1, t2})}});
  }
  return finish("t2t_log_convexity", table.function_id(), range_json(p.front().t, p.back().t, p.size()), m);
}

namespace {

// Largest grid value of log u(r) - log L(4r), tracked with its index.
struct RatioMax {
  double value = kNegInf;
  std::size_t index = 0;
  double r = 0.0;
  bool interior = false;
};

RatioMax lower_constant(const GrowthFunction& f, const LFunctionEvaluator& ev, const Grid& g) {
  RatioMax out;
  std::vector<double> d;
  for (double r : g.points) d.push_back(f.log_u(r) - ev.log_L(4.0 * r));
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > out.value) {
      out.value = d[i];
      out.index = i;
      out.r = g.points[i];
    }
  // Not still rising at the top of the grid.
  const std::size_t tail = tail_length(d.size());
  out.interior = d.size() >= 10;
  for (std::size_t i = d.size() - tail; i + 1 < d.size(); ++i)
    if (d[i + 1] > d[i] + 1e-12 * std::max(1.0, std::abs(d[i]))) out.interior = false;
  return out;
}

}  // namespace

VerificationReport check_lfunction_sandwich(const GrowthFunction& f, const LFunctionEvaluator& ev, double a,
                                            const Grid& r_grid) {
  if (!(a > 1.0)) throw ParameterError("check_lfunction_sandwich: a must be > 1");
  const double rc = ev.max_certified_r();
  const Grid upper_grid = clip(r_grid, 0.0, std::min(rc, f.validity_cap() / a));
  const Grid lower_grid = clip(r_grid, 0.0, rc / 4.0);
  if (upper_grid.size() < 3 || lower_grid.size() < 3)
    throw InsufficientTableError("check_lfunction_sandwich: L-table certifies too small a range", 0.0, ev.n_max());

  const double log_k = std::log(std::numbers::e * a / std::log(a));
  MarginTracker m;
  for (double r : upper_grid.points) m.add(log_k + f.log_u(a * r) - ev.log_L(r), {{"r", r}, {"part", "upper"}});

  const RatioMax c = lower_constant(f, ev, lower_grid);
  const RatioMax c_fine = lower_constant(f, ev, refine(lower_grid));
  const bool stable = c.interior && c_fine.interior && std::abs(c.value - c_fine.value) <= 0.05;

  VerificationReport rep = finish("lfunction_sandwich", f.id(),
                                  {{"upper", upper_grid.describe()}, {"lower", lower_grid.describe()}}, m);
  rep.constants = {{"a", a}, {"log_C", c.value}, {"C", std::exp(c.value)}, {"C_at_r", c.r},
                   {"log_C_refined", c_fine.value}, {"C_stable", stable}};
  if (!stable) {
    rep.pass = false;
    rep.detail = "constant C for u(r) <= C L(4r) is not certified (boundary maximum or unstable under refinement)";
  }
  return rep;
}

VerificationReport check_lemma_square(const LFunctionEvaluator& ev, const Grid& r_grid) {
  const Grid g = clip(r_grid, 0.0, ev.max_certified_r() / 8.0);
  if (g.empty()) throw InsufficientTableError("check_lemma_square: L-table certifies too small a range", 0.0, ev.n_max());
  const double l0 = ev.log_ell()[0];
  MarginTracker m;
  for (double r : g.points) m.add(l0 + ev.log_L(8.0 * r) - 2.0 * ev.log_L(r), {{"r", r}});
  return finish("lfunction_square", ev.function_id(), g.describe(), m);
}

VerificationReport check_lemma_sqrt(const GrowthFunction& f, const LFunctionEvaluator& ev, double a,
                                    const Grid& r_grid) {
  if (!(a > 1.0)) throw ParameterError("check_lemma_sqrt: a must be > 1");
  const Grid g = clip(r_grid, 0.0, std::min(ev.max_certified_r(), f.validity_cap() / (8.0 * a)));
  if (g.empty()) throw InsufficientTableError("check_lemma_sqrt: L-table certifies too small a range", 0.0, ev.n_max());
  const double rhs0 = 0.5 * (ev.log_ell()[0] + std::log(std::numbers::e * a / std::log(a)));
  MarginTracker m;
  for (double r : g.points) m.add(rhs0 + 0.5 * f.log_u(8.0 * a * r) - ev.log_L(r), {{"r", r}});
  VerificationReport rep = finish("lfunction_sqrt", f.id(), g.describe(), m);
  rep.constants = {{"a", a}};
  return rep;
}

VerificationReport check_legendre_duality(const GrowthFunction& f, const LegendreTable& table, const Grid& r_grid) {
  const Grid g = clip(r_grid, 0.0, f.validity_cap());
  MarginTracker m;
  for (double r : g.points) {
    const double lu = f.log_u(r);
    const double lr = r > 0.0 ? std::log(r) : kNegInf;
    for (const auto& p : table.points()) {
      if (r == 0.0 && p.t > 0.0) continue;  // r^t = 0: trivially true
      const double tl = p.t > 0.0 ? p.t * lr : 0.0;
      m.add_lazy(lu - tl - p.log_ell, [&] { return json{{"t", p.t}, {"r", r}, {"part", "young"}}; });
    }
  }
  for (const auto& p : table.points()) {
    const double tl = p.t > 0.0 ? p.t * std::log(p.r_star) : 0.0;
    m.add(-std::abs(f.log_u(p.r_star) - tl - p.log_ell), {{"t", p.t}, {"r", p.r_star}, {"part", "attainment"}});
  }
  json grid{{"r", g.describe()}, {"t", range_json(table.points().front().t, table.points().back().t, table.size())}};
  return finish("legendre_duality", table.function_id(), grid, m);
}

// ---- equivalence -----------------------------------------------------------

LogFunction as_log_function(const GrowthFunction& f) {
  return {f.id(), [f](double r) { return f.log_u(r); }, f.validity_cap()};
}

LogFunction as_log_function(const LFunctionEvaluator& ev) {
  return {"L[" + ev.function_id() + "]", [ev](double r) { return ev.log_L(r); }, ev.max_certified_r()};
}

LogFunction squared(const GrowthFunction& f) {
  return {f.id() + "^2", [f](double r) { return 2.0 * f.log_u(r); }, f.validity_cap()};
}

namespace {

struct SideResult {
  bool ok = false;
  double log_c = 0.0;
};

// upper: c = max_i d_i must not be rising at the end; lower: c = min_i d_i must not be falling.
SideResult extremal_constant(const std::vector<double>& d, bool upper) {
  SideResult out;
  if (d.size() < 10) return out;
  out.log_c = upper ? *std::max_element(d.begin(), d.end()) : *std::min_element(d.begin(), d.end());
  if (!std::isfinite(out.log_c)) return out;
  const std::size_t tail = tail_length(d.size());
  out.ok = true;
  for (std::size_t i = d.size() - tail; i + 1 < d.size(); ++i) {
    const double step = d[i + 1] - d[i], tol = 1e-12 * std::max(1.0, std::abs(d[i]));
    if (upper ? step > tol : step < -tol) out.ok = false;
  }
  return out;
}

}  // namespace

EquivalenceWitness find_equivalence(const LogFunction& f, const LogFunction& g, const Grid& r_grid) {
  EquivalenceWitness w;
  const Grid base = clip(r_grid, 0.0, g.max_r);
  std::vector<double> lg;
  for (double r : base.points) lg.push_back(g.log_f(r));

  auto side = [&](double a, bool upper) {
    std::vector<double> d;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (a * base.points[i] > f.max_r) break;
      d.push_back(lg[i] - f.log_f(a * base.points[i]));
    }
    // The scaled argument must still cover the grid.
    if (d.size() < base.size()) return SideResult{};
    return extremal_constant(d, upper);
  };

  bool up = false, lo = false;
  for (int k = 0; k <= 12 && !up; ++k) {
    const double a = std::ldexp(1.0, k);
    const SideResult s = side(a, true);
    if (s.ok) {
      up = true;
      w.a2 = a;
      w.log_c2 = s.log_c;
    }
  }
  for (int k = 0; k <= 12 && !lo; ++k) {
    const double a = std::ldexp(1.0, -k);
    const SideResult s = side(a, false);
    if (s.ok) {
      lo = true;
      w.a1 = a;
      w.log_c1 = s.log_c;
    }
  }
  w.found = up && lo;
  return w;
}

VerificationReport equivalence_witness(const LogFunction& f, const LogFunction& g, const Grid& r_grid) {
  const Grid base = clip(r_grid, 0.0, g.max_r);
  const EquivalenceWitness w = find_equivalence(f, g, base);
  const EquivalenceWitness wf = find_equivalence(f, g, refine(base));
  const bool stable = w.found && wf.found && w.a1 == wf.a1 && w.a2 == wf.a2 &&
                      std::abs(w.log_c1 - wf.log_c1) <= 0.05 && std::abs(w.log_c2 - wf.log_c2) <= 0.05;

  // Re-verify both bounds with the reported constants over the full grid.
  MarginTracker m;
  if (w.found) {
    for (double r : base.points) {
      const double lg = g.log_f(r);
      m.add(lg - (w.log_c1 + f.log_f(w.a1 * r)), {{"r", r}, {"part", "lower"}});
      m.add(w.log_c2 + f.log_f(w.a2 * r) - lg, {{"r", r}, {"part", "upper"}});
    }
  }
  VerificationReport rep = finish("equivalence", f.id + "~" + g.id, base.describe(), m);
  rep.constants = {{"found", w.found}, {"stable", stable}};
  if (w.found)
    rep.constants.update({{"c1", std::exp(w.log_c1)}, {"log_c1", w.log_c1}, {"a1", w.a1},
                          {"c2", std::exp(w.log_c2)}, {"log_c2", w.log_c2}, {"a2", w.a2},
                          {"refined", {{"log_c1", wf.log_c1}, {"a1", wf.a1}, {"log_c2", wf.log_c2}, {"a2", wf.a2}}}});
  rep.pass = rep.pass && w.found && stable;
  if (!w.found)
    rep.detail = "no dyadic witnesses with interior extremal ratios";
  else if (!stable)
    rep.detail = "witnesses change under grid refinement";
  return rep;
}

VerificationReport equivalence_witness(const GrowthFunction& f, const GrowthFunction& g, const Grid& r_grid) {
  return equivalence_witness(as_log_function(f), as_log_function(g), r_grid);
}

VerificationReport check_chain_order(const std::vector<LegendreTable>& tables, int n_max) {
  if (tables.size() < 2) throw ParameterError("check_chain_order: need at least two tables");
  if (n_max < 9) throw ParameterError("check_chain_order: n_max must be >= 9");
  for (const auto& t : tables) require_integer_table(t, static_cast<std::size_t>(n_max) + 1, "check_chain_order");

  VerificationReport rep;
  rep.check = "chain_order";
  json ids = json::array();
  for (const auto& t : tables) ids.push_back(t.function_id());
  rep.function_id = tables.front().function_id() + "<..<" + tables.back().function_id();
  rep.grid = {{"n_max", n_max}, {"chain", ids}};
  rep.constants = json::array();
  rep.pass = true;
  rep.worst_margin = kInf;
  for (std::size_t k = 0; k + 1 < tables.size(); ++k) {
    const auto& first = tables[k];
    const auto& second = tables[k + 1];
    json entry{{"first", first.function_id()}, {"second", second.function_id()}, {"found", false}};
    // The per-n growth rate of l_first / l_second must have levelled off;
    // otherwise no fixed a can hold beyond the table.
    bool rate_bounded = true;
    const std::size_t tail = tail_length(static_cast<std::size_t>(n_max));
    for (int n = n_max - static_cast<int>(tail); n + 2 <= n_max; ++n) {
      auto slope = [&](int i) {
        return (first.log_ell_at(i + 1) - second.log_ell_at(i + 1)) - (first.log_ell_at(i) - second.log_ell_at(i));
      };
      if (slope(n + 1) > slope(n) + 1e-9 * std::max(1.0, std::abs(first.log_ell_at(n)))) rate_bounded = false;
    }
    for (int e = 0; e <= 12 && rate_bounded; ++e) {
      const double la = e * std::numbers::ln2;
      std::vector<double> d;
      for (int n = 0; n <= n_max; ++n) d.push_back(first.log_ell_at(n) - second.log_ell_at(n) - n * la);
      const SideResult s = extremal_constant(d, true);
      if (!s.ok) continue;
      // margin of l_first(n) <= C a^n l_second(n) with the reported C
      double worst = kInf;
      for (double v : d) worst = std::min(worst, s.log_c - v);
      entry = {{"first", first.function_id()}, {"second", second.function_id()}, {"found", true},
               {"a", std::ldexp(1.0, e)}, {"log_C", s.log_c}, {"C", std::exp(s.log_c)}};
      rep.worst_margin = std::min(rep.worst_margin, worst);
      break;
    }
    if (!entry["found"].get<bool>()) {
      rep.pass = false;
      rep.witness = {{"first", first.function_id()}, {"second", second.function_id()}};
      rep.detail = "no dyadic witness for " + first.function_id() + " before " + second.function_id();
    }
    rep.constants.push_back(entry);
  }
  if (!std::isfinite(rep.worst_margin)) rep.worst_margin = 0.0;
  rep.pass = rep.pass && rep.worst_margin >= -kLogSlack;
  return rep;
}

// ---- suite -----------------------------------------------------------------

SuiteTables build_suite_tables(const GrowthFunction& f, const SuiteOptions& opt) {
  return {legendre_sequence(f, opt.l_table_n_max, opt.legendre), legendre_on_grid(f, opt.t_grid.points, opt.legendre)};
}

std::vector<VerificationReport> run_suite(const GrowthFunction& f, const SuiteTables& tables, const SuiteOptions& opt) {
  std::vector<VerificationReport> out;
  const LFunctionEvaluator ev(tables.integer_table);
  out.push_back(check_log_concavity(tables.integer_table));
  out.push_back(check_submultiplicativity(tables.integer_table, opt.pair_max));
  out.push_back(check_supermultiplicativity(tables.integer_table, opt.pair_max));
  out.push_back(check_t2t_logconvex(tables.real_table));
  out.push_back(check_lfunction_sandwich(f, ev, opt.a, opt.r_grid));
  out.push_back(check_lemma_square(ev, opt.r_grid));
  out.push_back(check_lemma_sqrt(f, ev, opt.a, opt.r_grid));
  out.push_back(check_legendre_duality(f, tables.integer_table, opt.r_grid));
  VerificationReport dual_t = check_legendre_duality(f, tables.real_table, opt.r_grid);
  dual_t.check = "legendre_duality_t_grid";
  out.push_back(dual_t);
  VerificationReport eq_l = equivalence_witness(as_log_function(f), as_log_function(ev), opt.r_grid);
  eq_l.check = "equivalence_u_L";
  out.push_back(eq_l);
  VerificationReport eq_sq = equivalence_witness(as_log_function(f), squared(f), opt.r_grid);
  eq_sq.check = "equivalence_u_u2";
  out.push_back(eq_sq);
  for (auto& r : out) r.function_id = f.id();
  return out;
}

std::vector<VerificationReport> run_suite(const GrowthFunction& f, const SuiteOptions& opt) {
  return run_suite(f, build_suite_tables(f, opt), opt);
}

VerificationReport corruption_sweep(const GrowthFunction& f, const SuiteTables& clean, const SuiteOptions& opt,
                                    std::size_t stride, double factor) {
  if (stride < 1 || !(factor > 0.0 && factor < 1.0))
    throw ParameterError("corruption_sweep: needs stride >= 1 and 0 < factor < 1");
  MarginTracker m;
  std::size_t missed = 0;
  auto probe = [&](bool integer, std::size_t i, double fac) {
    SuiteTables t = clean;
    LegendreTable& target = integer ? t.integer_table : t.real_table;
    target = target.with_log_ell(i, target.points()[i].log_ell + std::log(fac));
    // Table-only checks first; the full suite only when they all pass.
    bool caught = integer ? !check_log_concavity(target).pass || !check_submultiplicativity(target, opt.pair_max).pass ||
                                !check_supermultiplicativity(target, opt.pair_max).pass
                          : !check_t2t_logconvex(target).pass;
    caught = caught || !check_legendre_duality(f, target, opt.r_grid).pass;
    if (!caught)
      for (const auto& r : run_suite(f, t, opt)) caught = caught || !r.pass;
    missed += caught ? 0 : 1;
    m.add_lazy(caught ? 0.0 : -1.0, [&] {
      return json{{"table", integer ? "integer" : "t_grid"}, {"index", i}, {"factor", fac}};
    });
  };
  for (bool integer : {true, false}) {
    const std::size_t n = integer ? clean.integer_table.size() : clean.real_table.size();
    for (std::size_t i = 0; i < n; i += stride) {
      probe(integer, i, 1.0 + factor);
      probe(integer, i, 1.0 - factor);
    }
  }
  VerificationReport rep = finish("falsifiability", f.id(), {{"stride", stride}, {"factor", factor}}, m);
  rep.constants = {{"corruptions", m.count()}, {"missed", missed}};
  return rep;
}

}  // namespace hida
