#include "hida/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "hida/errors.hpp"
#include "hida/fock.hpp"
#include "hida/inequality_lab.hpp"
#include "hida/measures.hpp"
#include "hida/mittag_leffler.hpp"
#include "hida/numerics.hpp"

namespace hida {

using nlohmann::json;

namespace {

const std::set<std::string> kJobKinds{"eval", "conditions", "legendre", "lfn", "verify", "fock", "measures"};

// Typed access to a job's fields with schema errors that name the field.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {}

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) const {
    if (!j_.contains(key)) fail(key, "missing");
    return j_.at(key);
  }
  template <class T>
  T get(const char* key) const {
    try {
      return raw(key).get<T>();
    } catch (const json::exception& e) {
      fail(key, e.what());
    }
  }
  template <class T>
  T get(const char* key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }
  Grid grid(const char* key, const Grid& fallback) const {
    if (!has(key)) return fallback;
    try {
      return grid_from_json(j_.at(key));
    } catch (const SchemaError& e) {
      fail(key, e.what());
    }
  }
  std::vector<double> numbers(const char* key) const {
    const json& v = raw(key);
    if (v.is_number()) return {v.get<double>()};
    return grid(key, Grid{}).points;
  }
  [[noreturn]] void fail(const char* key, const std::string& why) const {
    throw SchemaError(where_ + ": field \"" + key + "\": " + why);
  }
  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
};

std::string job_where(std::size_t index, const json& job) {
  std::string s = "job " + std::to_string(index);
  if (job.is_object() && job.contains("name") && job["name"].is_string()) s += " (" + job["name"].get<std::string>() + ")";
  return s;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// One report from a list of (margin, where) pairs.
VerificationReport make_report(std::string check, std::string fid, json grid, const MarginTracker& m,
                               json constants = json::object()) {
  VerificationReport r;
  r.check = std::move(check);
  r.function_id = std::move(fid);
  r.grid = std::move(grid);
  r.worst_margin = m.count() ? m.worst() : 0.0;
  r.witness = m.witness();
  r.constants = std::move(constants);
  r.pass = m.ok();
  if (!m.count()) r.detail = "no comparisons executed";
  return r;
}

struct Context {
  const Manifest& manifest;
  const RunOptions& opt;
  std::size_t index;
  Fields f;

  LegendreOptions legendre() const {
    LegendreOptions lo;
    if (opt.tol) lo.tol = *opt.tol;
    lo.tol = f.get<double>("tol", lo.tol);
    return lo;
  }
  GrowthFunction function(const char* key = "function") const {
    const auto id = f.get<std::string>(key);
    const auto it = manifest.functions.find(id);
    if (it == manifest.functions.end()) f.fail(key, "undeclared function \"" + id + "\"");
    return GrowthFunction(it->second);
  }
  std::vector<GrowthFunction> functions(const char* key = "functions") const {
    std::vector<GrowthFunction> out;
    for (const auto& id : f.get<std::vector<std::string>>(key)) {
      const auto it = manifest.functions.find(id);
      if (it == manifest.functions.end()) f.fail(key, "undeclared function \"" + id + "\"");
      out.emplace_back(it->second);
    }
    return out;
  }
  std::uint64_t seed() const {
    if (f.has("seed")) return f.get<std::uint64_t>("seed");
    if (opt.seed) return *opt.seed;
    if (manifest.seed) return *manifest.seed;
    throw SchemaError(f.where() + ": stochastic job needs a seed (job \"seed\", manifest \"seed\" or --seed)");
  }
  std::optional<std::filesystem::path> output(const char* key) const {
    if (!f.has(key)) return std::nullopt;
    const std::filesystem::path p = f.get<std::string>(key);
    if (p.is_absolute() || !opt.out_dir) return p;
    return *opt.out_dir / p;
  }
};

// ---- eval / conditions / legendre / lfn -----------------------------------

void job_eval(const Context& c, JobOutcome& out) {
  if (c.f.has("mittag_leffler")) {
    const Fields ml(c.f.raw("mittag_leffler"), c.f.where() + ".mittag_leffler");
    const double lambda = ml.get<double>("lambda");
    const auto ts = ml.numbers("t");
    json values = json::array();
    for (double t : ts) values.push_back(finite_or_null(mittag_leffler(lambda, t)));
    out.result = {{"lambda", lambda}, {"t", ts}, {"value", values}};
    return;
  }
  const GrowthFunction fn = c.function();
  const Grid r = c.f.grid("r", default_r_grid());
  json values = json::array();
  for (double x : r.points) values.push_back(finite_or_null(fn.log_u(x)));
  out.result = {{"function", fn.id()}, {"r", r.points}, {"log_u", values}};
}

void job_conditions(const Context& c, JobOutcome& out) {
  const GrowthFunction fn = c.function();
  const ConditionReport rep = check_conditions(fn, c.f.grid("grid", default_r_grid()));
  out.result = rep.to_json();
  out.result["claims_hold"] = rep.claims_hold(fn);
  out.ok = rep.claims_hold(fn);
}

void job_legendre(const Context& c, JobOutcome& out) {
  const GrowthFunction fn = c.function();
  const LegendreTable table = c.f.has("t") ? legendre_on_grid(fn, c.f.numbers("t"), c.legendre())
                                           : legendre_sequence(fn, c.f.get<int>("n_max"), c.legendre());
  out.result = table.to_json();
  if (const auto p = c.output("csv")) {
    write_file(*p, table.to_csv());
    out.result["csv"] = p->lexically_normal().filename().string();
  }
}

void job_lfn(const Context& c, JobOutcome& out) {
  const GrowthFunction fn = c.function();
  const LFunctionEvaluator ev(legendre_sequence(fn, c.f.get<int>("n_max", 1024), c.legendre()));
  const double rc = ev.max_certified_r();
  json rows = json::array();
  for (double r : c.f.grid("r", clip(default_r_grid(), 0.0, rc)).points) {
    if (r > rc) {
      rows.push_back({{"r", r}, {"log_L", nullptr}, {"error", "beyond the certified range"}});
      out.ok = false;
      continue;
    }
    const auto res = ev.evaluate(r);
    rows.push_back({{"r", r}, {"log_L", res.log_value}, {"terms", res.terms},
                    {"log_tail_bound", finite_or_null(res.log_tail_bound)}});
  }
  out.result = {{"function", fn.id()}, {"n_max", ev.n_max()}, {"max_certified_r", rc}, {"values", rows}};
}

// ---- verify ----------------------------------------------------------------

SuiteOptions suite_options(const Context& c) {
  SuiteOptions o;
  o.pair_max = c.f.get<int>("pair_max", o.pair_max);
  o.l_table_n_max = c.f.get<int>("n_max", o.l_table_n_max);
  o.a = c.f.get<double>("a", o.a);
  o.r_grid = c.f.grid("r_grid", o.r_grid);
  o.t_grid = c.f.grid("t_grid", o.t_grid);
  o.legendre = c.legendre();
  return o;
}

void verify_suite(const Context& c, JobOutcome& out) {
  const GrowthFunction fn = c.function();
  auto reports = run_suite(fn, suite_options(c));
  if (c.f.has("checks")) {
    const auto keep = c.f.get<std::vector<std::string>>("checks");
    std::erase_if(reports, [&](const VerificationReport& r) {
      return std::find(keep.begin(), keep.end(), r.check) == keep.end();
    });
  }
  out.reports = std::move(reports);
}

void verify_falsifiability(const Context& c, JobOutcome& out) {
  const GrowthFunction fn = c.function();
  SuiteOptions o = suite_options(c);
  o.l_table_n_max = c.f.get<int>("n_max", 300);
  const int stride = c.f.get<int>("stride", 1);
  const double factor = c.f.get<double>("factor", 0.01);
  if (stride < 1 || !(factor > 0.0 && factor < 1.0)) c.f.fail("stride", "needs stride >= 1 and 0 < factor < 1");
  out.reports.push_back(corruption_sweep(fn, build_suite_tables(fn, o), o, static_cast<std::size_t>(stride), factor));
}

void verify_bidual(const Context& c, JobOutcome& out) {
  const GrowthFunction fn = c.function();
  const Grid r = c.f.grid("r", geometric_grid(1e-3, 1e6, 60));
  const double rel_tol = c.f.get<double>("rel_tol", 1e-6);
  MarginTracker m;
  for (double x : r.points) {
    const BidualResult b = bidual(fn, x, auto_t_cap(fn, x), c.legendre());
    m.add(rel_tol - b.abs_error() / std::abs(b.log_u), {{"r", x}, {"t_star", b.t_star}});
  }
  out.reports.push_back(make_report("biduality", fn.id(), r.describe(), m, {{"rel_tol", rel_tol}}));
}

void verify_closed_form(const Context& c, JobOutcome& out) {
  const auto betas = c.f.get<std::vector<double>>("betas", {0.0, 0.25, 0.5, 0.75});
  const Grid ts = c.f.grid("t", geometric_grid(0.1, 200.0, 50));
  const double rel_tol = c.f.get<double>("rel_tol", 1e-8);
  for (double beta : betas) {
    const GrowthFunction fn(kondratiev_streit(beta));
    MarginTracker m;
    for (double t : ts.points) {
      const double exact = (1.0 + beta) * t * (1.0 - std::log(t));
      const double got = legendre_transform(fn, t, c.legendre()).log_ell;
      m.add(rel_tol - std::abs(std::expm1(got - exact)), {{"t", t}});
    }
    out.reports.push_back(make_report("closed_form_legendre", fn.id(), ts.describe(), m, {{"rel_tol", rel_tol}}));
  }
}

void job_verify(const Context& c, JobOutcome& out) {
  const auto check = c.f.get<std::string>("check", "suite");
  if (check == "suite") return verify_suite(c, out);
  if (check == "falsifiability") return verify_falsifiability(c, out);
  if (check == "bidual") return verify_bidual(c, out);
  if (check == "closed_form_legendre") return verify_closed_form(c, out);
  if (check == "equivalence") {
    const auto fns = c.functions();
    if (fns.size() != 2) c.f.fail("functions", "equivalence takes exactly two functions");
    out.reports.push_back(equivalence_witness(fns[0], fns[1], c.f.grid("r_grid", default_r_grid())));
    return;
  }
  if (check == "chain_order") {
    std::vector<LegendreTable> tables;
    const int n_max = c.f.get<int>("n_max", 150);
    for (const auto& fn : c.functions()) tables.push_back(legendre_sequence(fn, n_max, c.legendre()));
    out.reports.push_back(check_chain_order(tables, n_max));
    return;
  }
  const GrowthFunction fn = c.function();
  const SuiteOptions o = suite_options(c);
  const LegendreTable table = legendre_sequence(fn, o.l_table_n_max, o.legendre);
  if (check == "log_concavity") return out.reports.push_back(check_log_concavity(table));
  if (check == "submultiplicativity") return out.reports.push_back(check_submultiplicativity(table, o.pair_max));
  if (check == "supermultiplicativity") return out.reports.push_back(check_supermultiplicativity(table, o.pair_max));
  if (check == "t2t_log_convexity")
    return out.reports.push_back(check_t2t_logconvex(legendre_on_grid(fn, o.t_grid.points, o.legendre)));
  if (check == "legendre_duality") return out.reports.push_back(check_legendre_duality(fn, table, o.r_grid));
  const LFunctionEvaluator ev(table);
  if (check == "lfunction_sandwich") return out.reports.push_back(check_lfunction_sandwich(fn, ev, o.a, o.r_grid));
  if (check == "lfunction_square") return out.reports.push_back(check_lemma_square(ev, o.r_grid));
  if (check == "lfunction_sqrt") return out.reports.push_back(check_lemma_sqrt(fn, ev, o.a, o.r_grid));
  c.f.fail("check", "unknown check \"" + check + "\"");
}

// ---- fock ------------------------------------------------------------------

ChaosSequence sequence(const Context& c, const char* key = "sequence") {
  try {
    return ChaosSequence::from_json(c.f.raw(key));
  } catch (const SchemaError& e) {
    c.f.fail(key, e.what());
  }
}

void job_fock(const Context& c, JobOutcome& out) {
  const auto op = c.f.get<std::string>("op");
  if (op == "hs_norm") {
    SequenceSpaceModel model{c.f.get<double>("rho", 0.5), c.f.get<int>("d", 32), c.f.get<double>("p0", 1.0)};
    const double q = c.f.get<double>("q"), p = c.f.get<double>("p", 0.0);
    const double closed = model.hs_norm_sq(q, p), direct = model.hs_norm_sq_direct(q, p);
    MarginTracker m;
    m.add(1e-12 - std::abs(closed - direct), {{"q", q}, {"p", p}});
    out.result = {{"closed_form", closed}, {"direct", direct}};
    out.reports.push_back(make_report("hs_norm", "model", {{"q", q}, {"p", p}}, m));
    return;
  }
  if (op == "s_transform") {
    const Grid xi = c.f.grid("xi", linear_grid(-3.0, 3.0, 61));
    const int order = c.f.get<int>("order", 12);
    if (c.f.has("sequence")) {
      const ChaosSequence s = sequence(c);
      json values = json::array();
      for (double x : xi.points) values.push_back(s_transform_1d(s, x, order).value);
      out.result = {{"xi", xi.points}, {"value", values}};
      return;
    }
    const int n_max = c.f.get<int>("n_max", 10);
    const double tol = c.f.get<double>("tol", 1e-8);
    MarginTracker m;
    for (int n = 0; n <= n_max; ++n)
      for (double x : xi.points) {
        const STransform s = s_transform_1d(ChaosSequence::delta(static_cast<std::size_t>(n)), x, order);
        const double expect = std::pow(x, n);
        m.add(s.exact ? tol - std::abs(s.value - expect) : -1.0,
              {{"n", n}, {"xi", x}});
      }
    out.reports.push_back(make_report("s_transform_hermite", "standard_gaussian", xi.describe(), m,
                                      {{"order", order}, {"n_max", n_max}, {"tol", tol}}));
    return;
  }

  const GrowthFunction fn = c.function();
  const int n_max = c.f.get<int>("n_max", 1024);
  const LegendreTable table = legendre_sequence(fn, n_max, c.legendre());
  if (op == "norms") {
    const ChaosSequence s = sequence(c);
    out.result = {{"function", fn.id()}, {"test_norm", finite_or_null(test_norm(s, table))},
                  {"dual_norm", finite_or_null(dual_norm(s, table))}};
    return;
  }
  if (op == "exp_vector") {
    const LFunctionEvaluator ev(table);
    const double rel_tol = c.f.get<double>("rel_tol", 1e-10), tail_tol = c.f.get<double>("tail_tol", 1e-12);
    MarginTracker m;
    json rows = json::array();
    for (double xi : c.f.numbers("xi")) {
      const double dn = dual_norm(ChaosSequence::exponential_vector(xi, table.size() - 1), table);
      const double en = exp_vector_norm(xi, ev);
      const auto res = ev.evaluate(xi * xi);
      const double tail = std::exp(res.log_tail_bound - res.log_value);
      m.add(rel_tol - std::abs(dn / en - 1.0), {{"xi", xi}, {"part", "identity"}});
      m.add(tail_tol - tail, {{"xi", xi}, {"part", "tail"}});
      rows.push_back({{"xi", xi}, {"dual_norm", dn}, {"exp_vector_norm", en}, {"relative_tail", tail}});
    }
    out.result = {{"values", rows}};
    out.reports.push_back(make_report("exp_vector_identity", fn.id(), {{"n_max", n_max}}, m,
                                      {{"rel_tol", rel_tol}, {"tail_tol", tail_tol}}));
    return;
  }
  if (op == "growth_bound") {
    SequenceSpaceModel model;
    model.rho = c.f.get<double>("rho", model.rho);
    out.reports.push_back(growth_bound_check(sequence(c), fn, c.f.get<double>("p", 0.0),
                                             c.f.grid("x_grid", linear_grid(-30.0, 30.0, 6001)), table, model));
    return;
  }
  if (op == "cauchy") {
    std::vector<double> taylor;
    const json& spec = c.f.raw("taylor");
    if (spec.is_string() && spec.get<std::string>() == "exp") {
      for (int n = 0; n <= c.f.get<int>("degree", 100); ++n) taylor.push_back(std::exp(-std::lgamma(n + 1.0)));
    } else {
      taylor = c.f.get<std::vector<double>>("taylor");
    }
    const double a = c.f.get<double>("a", 1.0);
    const double K = c.f.has("K") ? c.f.get<double>("K") : std::exp(1.0 / (2.0 * a));
    try {
      out.reports.push_back(cauchy_coefficient_bound(taylor, K, a, fn, table,
                                                     c.f.grid("radius", geometric_grid(1e-3, 60.0, 300))));
    } catch (const HypothesisViolatedError& e) {
      VerificationReport r;
      r.check = "cauchy_coefficient_bound";
      r.function_id = fn.id();
      r.worst_margin = e.log_margin();
      r.witness = {{"radius", e.radius()}};
      r.detail = e.what();
      out.reports.push_back(r);
    }
    return;
  }
  c.f.fail("op", "unknown fock op \"" + op + "\"");
}

// ---- measures --------------------------------------------------------------

// Optional {"expect": v, "rel_tol": x} comparison for scalar results.
void expect_scalar(const Context& c, JobOutcome& out, const char* check, double value) {
  if (!c.f.has("expect")) return;
  const double expect = c.f.get<double>("expect"), rel_tol = c.f.get<double>("rel_tol", 1e-6);
  MarginTracker m;
  m.add(rel_tol - std::abs(value / expect - 1.0), {{"value", finite_or_null(value)}});
  out.reports.push_back(make_report(check, "", json::object(), m, {{"expect", expect}, {"rel_tol", rel_tol}}));
}

void expect_flag(const Context& c, JobOutcome& out, const char* key, const char* check, bool actual) {
  if (!c.f.has(key)) return;
  MarginTracker m;
  m.add(actual == c.f.get<bool>(key) ? 0.0 : -1.0, {{key, actual}});
  out.reports.push_back(make_report(check, "", json::object(), m));
}

void job_measures(const Context& c, JobOutcome& out) {
  const auto op = c.f.get<std::string>("op");
  if (op == "fernique") {
    const auto r = fernique_product(c.f.get<double>("rho", 0.5), c.f.get<double>("q"), c.f.get<double>("c2"),
                                    c.f.get<double>("tail_tol", 1e-15));
    out.result = {{"value", finite_or_null(r.value)}, {"finite", r.finite}, {"factors", r.factors},
                  {"log_tail_bound", finite_or_null(r.log_tail_bound)}};
    if (r.finite) expect_scalar(c, out, "fernique_value", r.value);
    expect_flag(c, out, "expect_finite", "fernique_finiteness", r.finite);
    return;
  }
  if (op == "poisson") {
    const double tail_tol = c.f.get<double>("tail_tol", 1e-12);
    const auto form = c.f.get<std::string>("integrand", "example");
    std::function<double(int)> log_g;
    if (form == "example")
      log_g = log_g_example;
    else if (form == "growth")
      log_g = growth_integrand(c.function(), c.f.get<double>("w", 1.0));
    else if (form == "factorial_2k")
      log_g = [](int k) { return std::lgamma(k + 1.0) + k * std::numbers::ln2; };
    else
      c.f.fail("integrand", "expected \"example\", \"growth\" or \"factorial_2k\"");
    const auto r = poisson_integrability(c.f.get<double>("theta", 1.0), log_g, tail_tol,
                                         c.f.get<int>("max_terms", 100000));
    out.result = r.to_json();
    if (r.integrable) expect_scalar(c, out, "poisson_value", r.value);
    if (c.f.has("max_k")) {
      MarginTracker m;
      m.add(r.integrable && r.terms <= c.f.get<int>("max_k") + 1 ? 0.0 : -1.0, {{"terms", r.terms}});
      out.reports.push_back(make_report("poisson_tail", "", {{"max_k", c.f.get<int>("max_k")}}, m,
                                        {{"tail_tol", tail_tol}}));
    }
    expect_flag(c, out, "expect_integrable", "poisson_integrability", r.integrable);
    return;
  }
  if (op == "grey_cf") {
    const std::uint64_t seed = c.seed();
    const auto n = c.f.get<std::size_t>("n", 1000000);
    const double sigmas = c.f.get<double>("sigmas", 3.0);
    json rows = json::array();
    for (double lambda : c.f.numbers("lambda")) {
      const auto samples = grey_sample(lambda, n, seed);
      MarginTracker m;
      for (double xi : c.f.numbers("xi")) {
        const MCEstimate e = empirical_cf(samples, xi, seed);
        const double ml = mittag_leffler(lambda, xi * xi);
        m.add(sigmas * e.stderr_ - std::abs(e.value - ml), {{"xi", xi}});
        json row = e.to_json();
        row.update({{"lambda", lambda}, {"xi", xi}, {"mittag_leffler", ml}});
        rows.push_back(row);
      }
      out.reports.push_back(make_report("grey_cf", "grey_lambda" + json(lambda).dump(), {{"n", n}}, m,
                                        {{"lambda", lambda}, {"sigmas", sigmas}, {"seed", seed}}));
    }
    out.result = {{"values", rows}};
    return;
  }
  if (op == "grey_integrability") {
    const std::uint64_t seed = c.seed();
    const double lambda = c.f.get<double>("lambda");
    const MCEstimate e = grey_integrability(lambda, c.f.get<double>("w"), c.f.get<std::size_t>("n", 1000000), seed);
    out.result = e.to_json();
    if (c.f.has("expect")) {
      const double expect = c.f.get<double>("expect"), sigmas = c.f.get<double>("sigmas", 3.0);
      MarginTracker m;
      m.add(sigmas * e.stderr_ - std::abs(e.value - expect), {{"value", e.value}, {"stderr", e.stderr_}});
      out.reports.push_back(make_report("grey_integrability", "grey_lambda" + json(lambda).dump(), {{"n", e.n}}, m,
                                        {{"expect", expect}, {"sigmas", sigmas}, {"seed", seed}}));
    }
    expect_flag(c, out, "expect_stable", "grey_stability", e.stable);
    return;
  }
  if (op == "hida_condition") {
    const Fields s(c.f.raw("surrogate"), c.f.where() + ".surrogate");
    const auto kind = s.get<std::string>("kind");
    MeasureSurrogate m;
    if (kind == "gaussian")
      m = GaussianProduct{s.get<double>("rho", 0.5), s.get<double>("c2", 0.1)};
    else if (kind == "poisson")
      m = PoissonCount{s.get<double>("theta", 1.0), s.get<double>("rho", 0.5)};
    else if (kind == "grey")
      m = Grey1D{s.get<double>("lambda"), s.get<std::size_t>("n", 1000000), c.seed(), s.get<double>("rho", 0.5)};
    else
      s.fail("kind", "expected gaussian, poisson or grey");
    VerificationReport rep = hida_condition(m, c.function(), c.f.get<double>("p", 1.0));
    if (!c.f.get<bool>("expect_finite", true)) {
      // the job asserts divergence
      rep.pass = !rep.pass;
      rep.worst_margin = rep.pass ? 0.0 : -1.0;
      rep.check = "hida_condition_divergent";
    }
    out.reports.push_back(rep);
    return;
  }
  c.f.fail("op", "unknown measures op \"" + op + "\"");
}

bool is_stochastic(const json& job) {
  if (job.value("kind", "") != "measures") return false;
  const auto op = job.value("op", "");
  if (op == "grey_cf" || op == "grey_integrability") return true;
  return op == "hida_condition" && job.contains("surrogate") && job["surrogate"].is_object() &&
         job["surrogate"].value("kind", "") == "grey";
}

void check_references(const json& job, std::size_t index, const Manifest& m) {
  const std::string where = job_where(index, job);
  auto declared = [&](const json& id, const char* key) {
    if (!id.is_string()) throw SchemaError(where + ": field \"" + key + "\": function ids must be strings");
    if (!m.functions.count(id.get<std::string>()))
      throw SchemaError(where + ": field \"" + key + "\": undeclared function \"" + id.get<std::string>() + "\"");
  };
  if (job.contains("function")) declared(job["function"], "function");
  if (job.contains("functions")) {
    if (!job["functions"].is_array()) throw SchemaError(where + ": field \"functions\": must be an array");
    for (const auto& id : job["functions"]) declared(id, "functions");
  }
}

}  // namespace

// ---- manifest --------------------------------------------------------------

Manifest Manifest::parse(const json& j) {
  if (!j.is_object()) throw SchemaError("manifest: top level must be an object");
  if (!j.contains("schema_version")) throw SchemaError("manifest: field \"schema_version\": missing");
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kManifestSchemaVersion)
    throw SchemaError("manifest: field \"schema_version\": expected " + std::to_string(kManifestSchemaVersion));
  Manifest m;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw SchemaError("manifest: field \"seed\": must be a non-negative integer");
    m.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("functions")) {
    if (!j["functions"].is_object()) throw SchemaError("manifest: field \"functions\": must be an object");
    for (const auto& [id, spec] : j["functions"].items()) {
      try {
        m.functions.emplace(id, spec_from_json(spec, id));
      } catch (const SchemaError& e) {
        throw SchemaError("manifest: functions." + id + ": " + e.what());
      } catch (const ParameterError& e) {
        throw SchemaError("manifest: functions." + id + ": " + e.what());
      }
    }
  }
  if (j.contains("jobs")) {
    if (!j["jobs"].is_array()) throw SchemaError("manifest: field \"jobs\": must be an array");
    for (const auto& job : j["jobs"]) {
      const std::size_t index = m.jobs.size();
      if (!job.is_object()) throw SchemaError(job_where(index, job) + ": must be an object");
      if (!job.contains("kind") || !job["kind"].is_string())
        throw SchemaError(job_where(index, job) + ": field \"kind\": missing");
      if (!kJobKinds.count(job["kind"].get<std::string>()))
        throw SchemaError(job_where(index, job) + ": field \"kind\": unknown kind \"" +
                          job["kind"].get<std::string>() + "\"");
      check_references(job, index, m);
      m.jobs.push_back(job);
    }
  }
  return m;
}

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("manifest " + path.string() + ": " + e.what());
  }
  return parse(j);
}

// ---- running ---------------------------------------------------------------

json JobOutcome::to_json() const {
  json reps = json::array();
  for (const auto& r : reports) reps.push_back(r.to_json());
  json j{{"index", index}, {"name", name}, {"kind", kind}, {"status", ok ? "pass" : "fail"}, {"reports", reps}};
  if (!result.is_null()) j["result"] = result;
  if (!error.empty()) j["error"] = error;
  return j;
}

int RunSummary::exit_code() const {
  return std::all_of(jobs.begin(), jobs.end(), [](const JobOutcome& j) { return j.ok; }) ? 0 : 1;
}

json RunSummary::to_json() const {
  json jobs_j = json::array();
  for (const auto& j : jobs) {
    json reps = json::array();
    for (const auto& r : j.reports)
      reps.push_back({{"check", r.check}, {"function", r.function_id}, {"status", r.pass ? "pass" : "fail"},
                      {"worst_margin", finite_or_null(r.worst_margin)}});
    json e{{"index", j.index}, {"name", j.name}, {"kind", j.kind}, {"status", j.ok ? "pass" : "fail"}, {"reports", reps}};
    if (!j.error.empty()) e["error"] = j.error;
    jobs_j.push_back(e);
  }
  return {{"schema_version", kManifestSchemaVersion}, {"status", exit_code() == 0 ? "pass" : "fail"},
          {"jobs", jobs_j}, {"warnings", warnings}};
}

std::string RunSummary::text() const {
  std::ostringstream s;
  std::vector<VerificationReport> all;
  for (const auto& j : jobs) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4zu %-10s %-36s %s%s%s\n", j.index, j.kind.c_str(), j.name.c_str(),
                  j.ok ? "pass" : "FAIL", j.error.empty() ? "" : "  ", j.error.c_str());
    s << line;
    all.insert(all.end(), j.reports.begin(), j.reports.end());
  }
  if (!all.empty()) {
    sort_reports(all);
    s << "\n" << summary_table(all);
  }
  for (const auto& w : warnings) s << "warning: " << w << "\n";
  const auto failed = std::count_if(jobs.begin(), jobs.end(), [](const JobOutcome& j) { return !j.ok; });
  s << jobs.size() << " jobs, " << failed << " failed\n";
  return s.str();
}

JobOutcome run_job(const json& job, std::size_t index, const Manifest& m, const RunOptions& opt) {
  JobOutcome out;
  out.index = index;
  out.kind = job.value("kind", "");
  out.name = job.contains("name") && job["name"].is_string() ? job["name"].get<std::string>()
                                                             : out.kind + "_" + std::to_string(index);
  out.ok = true;
  const Context c{m, opt, index, Fields(job, job_where(index, job))};
  try {
    if (out.kind == "eval") job_eval(c, out);
    else if (out.kind == "conditions") job_conditions(c, out);
    else if (out.kind == "legendre") job_legendre(c, out);
    else if (out.kind == "lfn") job_lfn(c, out);
    else if (out.kind == "verify") job_verify(c, out);
    else if (out.kind == "fock") job_fock(c, out);
    else if (out.kind == "measures") job_measures(c, out);
    else throw SchemaError(c.f.where() + ": field \"kind\": unknown kind \"" + out.kind + "\"");
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  for (auto& r : out.reports) {
    if (r.function_id.empty()) r.function_id = out.name;
    out.ok = out.ok && r.pass;
  }
  return out;
}

RunSummary run(const Manifest& m, const RunOptions& opt) {
  RunSummary summary;
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < m.jobs.size(); ++i) {
    if (opt.only_kind && m.jobs[i]["kind"] != *opt.only_kind) continue;
    if (is_stochastic(m.jobs[i]) && !m.jobs[i].contains("seed") && !opt.seed && !m.seed)
      throw SchemaError(job_where(i, m.jobs[i]) + ": stochastic job needs a seed (job \"seed\", manifest \"seed\" or --seed)");
    selected.push_back(i);
  }
  if (selected.empty()) {
    summary.warnings.push_back("manifest selects no jobs; nothing to do");
    return summary;
  }
  summary.jobs.resize(selected.size());
  std::exception_ptr schema_error;
  parallel_for(selected.size(), opt.jobs, [&](std::size_t k) {
    summary.jobs[k] = run_job(m.jobs[selected[k]], selected[k], m, opt);
    if (opt.out_dir) {
      char prefix[16];
      std::snprintf(prefix, sizeof prefix, "%03zu_", selected[k]);
      write_file(*opt.out_dir / "jobs" / (prefix + summary.jobs[k].name + ".json"),
                 summary.jobs[k].to_json().dump(2) + "\n");
    }
  });
  if (opt.out_dir) {
    write_file(*opt.out_dir / "summary.json", summary.to_json().dump(2) + "\n");
    write_file(*opt.out_dir / "summary.txt", summary.text());
  }
  return summary;
}

void emit_legendre_table(const GrowthFunctionSpec& spec, int n_max, const std::filesystem::path& path,
                         const LegendreOptions& opt) {
  write_file(path, legendre_sequence(GrowthFunction(spec), n_max, opt).to_csv());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace hida
