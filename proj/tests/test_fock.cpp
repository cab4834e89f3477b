#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hida/errors.hpp"
#include "hida/fock.hpp"

using namespace hida;

namespace {

const LegendreTable& ks0_table() {
  static const LegendreTable t = legendre_sequence(GrowthFunction(kondratiev_streit(0.0)), 200);
  return t;
}

ChaosSequence hermite(std::size_t n) { return ChaosSequence::delta(n); }

Grid symmetric_grid(double x_max, int n) { return linear_grid(-x_max, x_max, n); }

}  // namespace

TEST_CASE("sequence-space model") {
  SequenceSpaceModel m;
  CHECK(m.hs_norm_sq(1.0, 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (double q : {0.5, 1.0, 2.0, 3.5})
    CHECK(std::abs(m.hs_norm_sq(q, 0.0) - m.hs_norm_sq_direct(q, 0.0)) <= 1e-12);
  CHECK_THROWS_AS(m.hs_norm_sq(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS((SequenceSpaceModel{1.0, 32, 1.0}.validate()), ParameterError);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(32);
    for (auto& v : x) v = g(rng);
    for (double p : {0.0, 0.5, 2.0}) {
      CHECK(m.norm(x, 0.0) <= std::pow(m.rho, p) * m.norm(x, p) * (1 + 1e-14));
      for (double q : {p, p + 0.5, p + 3.0})
        CHECK(m.norm(x, -q) <= std::pow(m.rho, q - p) * m.norm(x, -p) * (1 + 1e-14));
    }
  }
  CHECK_THROWS_AS(m.norm(std::vector<double>(33, 1.0), 0.0), ParameterError);
}

TEST_CASE("test and dual norms") {
  const auto& t = ks0_table();
  CHECK(test_norm(ChaosSequence::delta(0), t) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(test_norm(ChaosSequence::delta(1), t) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(test_norm(ChaosSequence::exponential_vector(1.0, 200), t) ==
        doctest::Approx(1.2451562360730196323).epsilon(1e-12));

  CHECK(dual_norm(ChaosSequence::delta(0), t) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dual_norm(ChaosSequence::delta(2), t) == doctest::Approx(std::numbers::e).epsilon(1e-12));

  CHECK_THROWS_AS(test_norm(ChaosSequence::delta(201), t), ParameterError);
}

TEST_CASE("exponential vector norm") {
  const auto& t = ks0_table();
  const LFunctionEvaluator ev(t);
  CHECK(exp_vector_norm(0.0, ev) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exp_vector_norm(1.0, ev) == doctest::Approx(2.5652291072161263085).epsilon(1e-13));
  for (double xi : {0.5, 1.0, 2.0}) {
    const double a = dual_norm(ChaosSequence::exponential_vector(xi, 200), t);
    const double b = exp_vector_norm(xi, ev);
    CAPTURE(xi);
    CHECK(std::abs(a / b - 1.0) <= 1e-10);
  }
  CHECK_THROWS_AS(exp_vector_norm(-1.0, ev), ParameterError);
}

TEST_CASE("pairing bound") {
  const auto& t = ks0_table();
  const auto one = pairing_bound(ChaosSequence::delta(0), ChaosSequence::delta(0), t);
  CHECK(one.pairing == doctest::Approx(1.0));
  CHECK(one.bound == doctest::Approx(1.0));
  CHECK(one.holds);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    ChaosSequence F, f;
    for (int n = 0; n <= 30; ++n) {
      F.c.push_back(u(rng) * std::exp(0.5 * t.log_ell_at(n)));
      f.c.push_back(u(rng) * std::exp(-std::lgamma(n + 1.0) - 0.5 * t.log_ell_at(n)));
    }
    CHECK(pairing_bound(F, f, t).holds);
  }

  // F_n = n! l(n) f_n makes the two weighted vectors parallel.
  ChaosSequence F, f;
  for (int n = 0; n <= 20; ++n) {
    f.c.push_back(std::exp(-std::lgamma(n + 1.0)) / (n + 1.0));
    F.c.push_back(std::exp(std::lgamma(n + 1.0) + t.log_ell_at(n)) * f.c.back());
  }
  const auto tight = pairing_bound(F, f, t);
  CHECK(tight.pairing == doctest::Approx(tight.bound).epsilon(1e-12));

  ChaosSequence shorter = ChaosSequence::delta(0);
  CHECK_THROWS_AS(pairing_bound(shorter, ChaosSequence::delta(1), t), ParameterError);
}

TEST_CASE("Hermite evaluation") {
  CHECK(hermite_eval_1d(hermite(1), 3.0) == 3.0);
  CHECK(hermite_eval_1d(hermite(2), 2.0) == 3.0);
  CHECK(hermite_eval_1d(hermite(0), -7.5) == 1.0);
  CHECK(hermite_eval_1d(hermite(3), 2.0) == doctest::Approx(2.0));    // 8 - 6
  CHECK(hermite_eval_1d(hermite(4), 1.0) == doctest::Approx(-2.0));   // 1 - 6 + 3
  ChaosSequence mix{{1.0, -2.0, 0.5}};
  CHECK(hermite_eval_1d(mix, 1.5) == doctest::Approx(1.0 - 3.0 + 0.5 * 1.25));
}

TEST_CASE("A-norm and growth bound") {
  GrowthFunction u(kondratiev_streit(0.0));
  const Grid grid = symmetric_grid(30.0, 60001);

  const auto c = a_norm_1d(hermite(0), u, 0.0, grid);
  CHECK(c.value == doctest::Approx(1.0));
  CHECK(c.x_at == 0.0);
  CHECK_FALSE(c.boundary);

  const auto h1 = a_norm_1d(hermite(1), u, 0.0, grid);
  CHECK(h1.value == doctest::Approx(std::exp(-0.5)).epsilon(1e-8));
  CHECK(std::abs(h1.x_at) == doctest::Approx(1.0).epsilon(1e-3));

  CHECK(a_norm_1d(hermite(2), u, 0.0, grid).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a_norm_1d(hermite(3), u, 0.0, grid).value == doctest::Approx(1.3801190461607491117).epsilon(1e-7));

  const auto small = a_norm_1d(hermite(3), u, 0.0, symmetric_grid(0.5, 101));
  CHECK(small.boundary);
  CHECK_FALSE(small.warnings.empty());

  const auto& t = ks0_table();
  const auto one = growth_bound_check(hermite(0), u, 0.0, grid, t);
  CHECK(one.pass);
  CHECK(one.constants["C"].get<double>() == doctest::Approx(1.0));
  const auto he3 = growth_bound_check(hermite(3), u, 0.0, grid, t);
  CHECK(he3.pass);
  CHECK(he3.constants["C"].get<double>() == doctest::Approx(1.1903546974324845698).epsilon(1e-7));
  CHECK_FALSE(growth_bound_check(hermite(3), u, 0.0, symmetric_grid(0.5, 101), t).pass);

  GrowthFunction u5(kondratiev_streit(0.5));
  const auto t5 = legendre_sequence(u5, 20);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    ChaosSequence phi;
    for (int n = 0; n <= 10; ++n) phi.c.push_back(g(rng));
    const auto rep = growth_bound_check(phi, u5, 0.0, symmetric_grid(40.0, 8001), t5);
    CHECK(rep.pass);
    CHECK(std::isfinite(rep.constants["C"].get<double>()));
  }
}

TEST_CASE("S-transform by Gauss-Hermite quadrature") {
  const auto rule = gauss_hermite(5);
  double total = 0.0;
  for (double w : rule.weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  for (std::size_t n = 0; n <= 10; ++n)
    for (double xi : linear_grid(-3.0, 3.0, 13).points) {
      const auto s = s_transform_1d(hermite(n), xi, 12);
      CAPTURE(n);
      CAPTURE(xi);
      CHECK(s.exact);
      CHECK(std::abs(s.value - std::pow(xi, static_cast<double>(n))) <= 1e-8);
    }
  CHECK(s_transform_1d(hermite(0), 1.7, 1).value == doctest::Approx(1.0));
  CHECK(std::abs(s_transform_1d(hermite(2), 0.0, 4).value) <= 1e-14);

  // Low-degree expansions against hand-expanded polynomials.
  for (double xi : {-2.5, 0.3, 1.9}) {
    ChaosSequence p{{1.0, 2.0, -1.0, 0.5, 0.25}};
    const double expect = 1.0 + 2.0 * xi - xi * xi + 0.5 * xi * xi * xi + 0.25 * xi * xi * xi * xi;
    CHECK(s_transform_1d(p, xi, 3).value == doctest::Approx(expect).epsilon(1e-12));
  }

  const auto low = s_transform_1d(hermite(8), 1.0, 3);
  CHECK_FALSE(low.exact);
  CHECK_FALSE(low.warnings.empty());
}

TEST_CASE("Cauchy coefficient bound") {
  GrowthFunction u(kondratiev_streit(0.0));
  const auto& t = ks0_table();
  const Grid radii = geometric_grid(1e-3, 60.0, 300);

  std::vector<double> exp_coeffs;
  for (int n = 0; n <= 100; ++n) exp_coeffs.push_back(std::exp(-std::lgamma(n + 1.0)));
  const auto rep = cauchy_coefficient_bound(exp_coeffs, std::exp(0.5), 1.0, u, t, radii);
  CHECK(rep.pass);
  CHECK(rep.worst_margin >= 0.0);

  const auto c = cauchy_coefficient_bound({2.0}, 2.0, 1.0, u, t, radii);
  CHECK(c.pass);
  CHECK(c.worst_margin == doctest::Approx(0.0));

  std::vector<double> gauss;
  for (int n = 0; n <= 60; ++n) gauss.push_back(n % 2 ? 0.0 : std::exp(-std::lgamma(n / 2 + 1.0)));
  CHECK_THROWS_AS(cauchy_coefficient_bound(gauss, 1.0, 1.0, u, t, radii), HypothesisViolatedError);
  try {
    cauchy_coefficient_bound(gauss, 1.0, 1.0, u, t, radii);
  } catch (const HypothesisViolatedError& e) {
    CHECK(e.radius() == radii.points.front());
    CHECK(e.log_margin() < 0.0);
  }
}

TEST_CASE("chaos sequence JSON") {
  const auto s = ChaosSequence::from_json(nlohmann::json::parse(R"([1, 0.5, -2])"));
  CHECK(s.size() == 3);
  CHECK(s.degree() == 2);
  const auto e = ChaosSequence::exponential_vector(2.0, 5);
  const auto back = ChaosSequence::from_json(e.to_json());
  CHECK(back.log_domain);
  CHECK(back.c == e.c);
  CHECK_THROWS_AS(ChaosSequence::from_json(nlohmann::json::parse(R"({"level": 1})")), SchemaError);
  CHECK_THROWS_AS(ChaosSequence::from_json(nlohmann::json::parse(R"(["x"])")), SchemaError);
}
