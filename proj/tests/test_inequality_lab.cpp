#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hida/errors.hpp"
#include "hida/inequality_lab.hpp"

using namespace hida;

namespace {

LegendreTable ks_table(double beta, int n_max) {
  return legendre_sequence(GrowthFunction(kondratiev_streit(beta)), n_max);
}

LegendreTable closed_form_table(double beta, const std::vector<double>& ts) {
  std::vector<LegendrePoint> pts;
  for (double t : ts)
    pts.push_back({t, t > 0.0 ? (1.0 + beta) * t * (1.0 - std::log(t)) : 0.0, std::pow(t, 1.0 + beta)});
  return LegendreTable("ks_closed", pts, 0.0);
}

std::vector<double> integers(int n) {
  std::vector<double> v;
  for (int i = 0; i <= n; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("log-concavity") {
  CHECK(check_log_concavity(ks_table(0.0, 100)).pass);

  const auto minimal = check_log_concavity(closed_form_table(0.0, integers(2)));
  CHECK(minimal.pass);
  CHECK(minimal.witness["n"] == 0);
  CHECK(minimal.worst_margin == doctest::Approx(2.0 * std::log(2.0)));

  // the curvature of n log(e/n) is about 1/n, so a 1% dip shows beyond n = 50
  const auto t = ks_table(0.0, 100);
  const auto bad = check_log_concavity(t.with_log_ell(80, t.log_ell_at(80) - std::log(1.01)));
  CHECK_FALSE(bad.pass);
  CHECK(bad.witness["n"] == 79);
  CHECK(bad.to_json()["status"] == "fail");

  CHECK_THROWS_AS(check_log_concavity(closed_form_table(0.0, integers(1))), ParameterError);
  CHECK_THROWS_AS(check_log_concavity(closed_form_table(0.0, {0.5, 1.0, 1.5})), ParameterError);
}

TEST_CASE("sub- and supermultiplicativity") {
  const auto t = closed_form_table(0.0, integers(2));
  const auto sub = check_submultiplicativity(t, 1);
  CHECK(sub.pass);
  // pairs with n = 0 give equality
  CHECK(sub.worst_margin == doctest::Approx(0.0));
  const auto sup = check_supermultiplicativity(t, 0);
  CHECK(sup.pass);
  CHECK(sup.worst_margin == doctest::Approx(0.0));
  // n = m = 1: e^2 <= 2^4 (e/2)^2 holds with equality.
  const auto sup1 = check_supermultiplicativity(t, 1);
  CHECK(sup1.pass);

  const auto bell = legendre_sequence(GrowthFunction(bell_series(2)), 120);
  CHECK(check_submultiplicativity(bell, 60).pass);
  CHECK(check_supermultiplicativity(bell, 60).pass);
  const auto g2 = legendre_sequence(GrowthFunction(iterated_exp_sqrt(2)), 120);
  CHECK(check_supermultiplicativity(g2, 60).pass);
  CHECK(check_submultiplicativity(g2, 60).pass);

  const auto bad = check_submultiplicativity(
      bell.with_log_ell(2, 2.0 * bell.log_ell_at(1) - bell.log_ell_at(0) + 0.1), 60);
  CHECK_FALSE(bad.pass);
  CHECK(bad.witness["n"] == 1);
  CHECK(bad.witness["m"] == 1);
}

TEST_CASE("t^{2t} log-convexity") {
  const auto grid = geometric_grid(0.5, 50.0, 80).points;
  CHECK(check_t2t_logconvex(closed_form_table(0.0, grid)).pass);
  CHECK(check_t2t_logconvex(legendre_on_grid(GrowthFunction(iterated_exp_sqrt(3)), grid)).pass);

  const auto three = check_t2t_logconvex(closed_form_table(0.0, {1.0, 2.0, 3.0}));
  CHECK(three.pass);
  CHECK(three.witness["t"].size() == 3);

  const auto t = closed_form_table(0.0, grid);
  const auto bad = check_t2t_logconvex(t.with_log_ell(40, t.points()[40].log_ell + std::log(1.01)));
  CHECK_FALSE(bad.pass);
  CHECK(bad.witness["t"][1].get<double>() == t.points()[40].t);
}

TEST_CASE("L-function inequalities") {
  GrowthFunction f(kondratiev_streit(0.0));
  const LFunctionEvaluator ev(legendre_sequence(f, 400));
  const Grid grid = default_r_grid();

  const auto sandwich = check_lfunction_sandwich(f, ev, 2.0, grid);
  CHECK(sandwich.pass);
  CHECK(sandwich.worst_margin >= 0.0);
  CHECK(sandwich.constants["C_stable"] == true);
  // For u = e^r the lower constant is 1, attained at r = 0.
  CHECK(sandwich.constants["log_C"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sandwich.grid["upper"]["max"].get<double>() <= ev.max_certified_r());

  const auto sq = check_lemma_square(ev, grid);
  CHECK(sq.pass);
  CHECK(sq.worst_margin == doctest::Approx(0.0));  // equality at r = 0
  CHECK(sq.witness["r"] == 0.0);

  CHECK(check_lemma_sqrt(f, ev, 2.0, grid).pass);
  GrowthFunction g2(iterated_exp_sqrt(2));
  const LFunctionEvaluator ev2(legendre_sequence(g2, 400));
  CHECK(check_lemma_sqrt(g2, ev2, 2.0, grid).pass);
  CHECK(check_lfunction_sandwich(g2, ev2, 2.0, grid).pass);

  CHECK_THROWS_AS(check_lfunction_sandwich(f, ev, 1.0, grid), ParameterError);
  const LFunctionEvaluator tiny(legendre_sequence(f, 3));
  CHECK_THROWS_AS(check_lemma_square(tiny, clip(grid, 1e3, 1e8)), InsufficientTableError);
}

TEST_CASE("Legendre duality catches corrupted entries") {
  GrowthFunction f(kondratiev_streit(0.5));
  const auto t = legendre_sequence(f, 200);
  CHECK(check_legendre_duality(f, t, default_r_grid()).pass);
  for (std::size_t i : {0u, 1u, 57u, 200u})
    for (double fac : {1.01, 0.99}) {
      CAPTURE(i);
      CAPTURE(fac);
      CHECK_FALSE(check_legendre_duality(f, t.with_log_ell(i, t.log_ell_at(i) + std::log(fac)), default_r_grid()).pass);
    }
}

TEST_CASE("equivalence witnesses") {
  const Grid grid = default_r_grid();
  GrowthFunction u(kondratiev_streit(0.0));

  const auto self = find_equivalence(as_log_function(u), as_log_function(u), grid);
  CHECK(self.found);
  CHECK(self.a1 == 1.0);
  CHECK(self.a2 == 1.0);
  CHECK(self.log_c1 == 0.0);
  CHECK(self.log_c2 == 0.0);

  const auto sq = equivalence_witness(as_log_function(u), squared(u), grid);
  CHECK(sq.pass);
  CHECK(sq.constants["a2"] == 2.0);

  const auto bell = equivalence_witness(GrowthFunction(iterated_exp_sqrt(2)), GrowthFunction(bell_series(2)), grid);
  CHECK(bell.pass);
  CHECK(bell.grid["max"].get<double>() == 1e8);

  // g_2 grows slower than any e^{cr}
  const auto no = equivalence_witness(GrowthFunction(iterated_exp_sqrt(2)), u, grid);
  CHECK_FALSE(no.pass);
  CHECK(no.constants["found"] == false);
  CHECK_FALSE(no.detail.empty());
}

TEST_CASE("chain order") {
  std::vector<LegendreTable> chain;
  for (const auto& s : {iterated_exp_sqrt(3), iterated_exp_sqrt(2), kondratiev_streit(0.5), kondratiev_streit(0.25)})
    chain.push_back(legendre_sequence(GrowthFunction(s), 150));
  const auto ok = check_chain_order(chain, 150);
  CHECK(ok.pass);
  CHECK(ok.constants.size() == 3);

  std::vector<LegendreTable> same{chain[2], chain[2]};
  const auto id = check_chain_order(same, 150);
  CHECK(id.pass);
  CHECK(id.constants[0]["a"] == 1.0);
  CHECK(id.constants[0]["C"] == 1.0);

  std::vector<LegendreTable> reversed{chain[3], chain[2]};
  CHECK_FALSE(check_chain_order(reversed, 150).pass);
  std::vector<LegendreTable> reversed_g{chain[1], chain[0]};
  CHECK_FALSE(check_chain_order(reversed_g, 150).pass);
}

TEST_CASE("suite report set is complete and sorted") {
  GrowthFunction f(kondratiev_streit(0.0));
  SuiteOptions opt;
  opt.l_table_n_max = 300;
  auto reps = run_suite(f, opt);
  CHECK(reps.size() == 11);
  for (const auto& r : reps) {
    CAPTURE(r.check);
    CHECK(r.pass);
    CHECK(r.function_id == "ks_beta0");
  }
  sort_reports(reps);
  for (std::size_t i = 1; i < reps.size(); ++i) CHECK(reps[i - 1].check <= reps[i].check);
}

TEST_CASE("corruption sweep") {
  GrowthFunction f(iterated_exp_sqrt(3));
  SuiteOptions opt;
  opt.l_table_n_max = 200;
  const SuiteTables clean = build_suite_tables(f, opt);
  const auto r = corruption_sweep(f, clean, opt, 37);
  CHECK(r.pass);
  CHECK(r.constants["missed"] == 0);
  CHECK(r.constants["corruptions"] == 2 * ((201 + 36) / 37 + (160 + 36) / 37));
  // Below the comparison slack nothing can be caught.
  const auto tiny = corruption_sweep(f, clean, opt, 100, 1e-12);
  CHECK_FALSE(tiny.pass);
  CHECK(tiny.witness["index"] == 0);
  CHECK_THROWS_AS(corruption_sweep(f, clean, opt, 0), ParameterError);
}
