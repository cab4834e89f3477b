#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hida/bell.hpp"
#include "hida/errors.hpp"
#include "hida/growth.hpp"
#include "hida/mittag_leffler.hpp"
#include "hida/numerics.hpp"

using namespace hida;

namespace {

// Bell triangle: independent of the EGF composition used by the library.
std::vector<unsigned long long> bell_triangle(int n_max) {
  std::vector<unsigned long long> out{1};
  std::vector<unsigned long long> row{1};
  for (int n = 1; n <= n_max; ++n) {
    std::vector<unsigned long long> next{row.back()};
    for (unsigned long long v : row) next.push_back(next.back() + v);
    out.push_back(next.front());
    row = next;
  }
  return out;
}

}  // namespace

TEST_CASE("bell numbers: order 2 is the classical sequence") {
  const auto b = bell_numbers(2, 25);
  const auto ref = bell_triangle(25);
  for (int n = 0; n <= 25; ++n) CHECK(b[n] == ref[n]);
}

TEST_CASE("bell numbers: order 1 is identically one, order 3 composes twice") {
  for (const auto& v : bell_numbers(1, 10)) CHECK(v == 1);
  const auto b3 = bell_numbers(3, 5);
  const unsigned expect[] = {1, 1, 3, 12, 60, 358};
  for (int n = 0; n <= 5; ++n) CHECK(b3[n] == expect[n]);
}

TEST_CASE("bell numbers are log-convex, checked exactly") {
  for (int k = 1; k <= 4; ++k) {
    const auto b = bell_numbers(k, 120);
    for (std::size_t n = 0; n + 2 < b.size(); ++n) CHECK(b[n] * b[n + 2] >= b[n + 1] * b[n + 1]);
  }
}

TEST_CASE("bell numbers report capacity with the largest safe n") {
  try {
    bell_numbers(2, 2000);
    FAIL("expected CapacityError");
  } catch (const CapacityError& e) {
    CHECK(e.max_safe_n() > 100);
    CHECK_NOTHROW(bell_numbers(2, e.max_safe_n()));
  }
  CHECK_THROWS_AS(bell_numbers(0, 3), ParameterError);
}

TEST_CASE("log-domain coefficient table matches exact integers") {
  const auto b = bell_numbers(3, 60);
  const auto lc = log_exp_k_taylor(3, 60);
  for (int n = 0; n <= 60; ++n) {
    const double exact = std::log(b[n].convert_to<double>()) - std::lgamma(n + 1.0);
    CHECK(lc[n] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("saddle-point coefficients continue the table smoothly") {
  for (int k : {1, 2, 3}) {
    ExpKCoefficients small(k, 1000);
    const auto big = log_exp_k_taylor(k, 3000);
    for (int n : {1001, 1500, 2500, 3000}) CHECK(small.log_coeff(n) == doctest::Approx(big[n]).epsilon(1e-10));
  }
}

TEST_CASE("log_u closed forms") {
  CHECK(log_u(kondratiev_streit(0.0), 1.0) == doctest::Approx(1.0));
  CHECK(log_u(iterated_exp_sqrt(2), std::exp(2.0)) == doctest::Approx(2.0 * std::numbers::e));
  CHECK(log_u(kondratiev_streit(0.5), 8.0) == doctest::Approx(1.5 * 4.0));
  CHECK(log_u(exponential(2.0), 3.0) == doctest::Approx(6.0));
  CHECK_THROWS_AS(log_u(kondratiev_streit(1.0), 1.0), ParameterError);
  CHECK_THROWS_AS(log_u(kondratiev_streit(-0.1), 1.0), ParameterError);
  CHECK_THROWS_AS(log_u(iterated_exp_sqrt(1), 1.0), ParameterError);
}

TEST_CASE("bell series matches a direct series oracle") {
  CHECK(log_u(bell_series(2), 10.0) == doctest::Approx(4.8121711081360445238).epsilon(1e-13));
  // beyond the exact coefficient table (peak n = 2450 and 28566)
  GrowthFunction u2(bell_series(2));
  CHECK(u2.log_u(1e4) == doctest::Approx(347.0848527139403234167294).epsilon(1e-13));
  CHECK(u2.log_u(1e6) == doctest::Approx(4497.241510454716136922584).epsilon(1e-13));
  CHECK(u2.log_u(1e8) == doctest::Approx(53635.03064882512638196844).epsilon(1e-13));
  // order 1 collapses to e^r
  GrowthFunction e1(bell_series(1));
  for (double r : {0.5, 10.0, 300.0, 5e4, 1e7}) CHECK(e1.log_u(r) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("bell series evaluation is smooth across the table boundary and finite far out") {
  GrowthFunction u2(bell_series(2));
  double prev = 0.0;
  for (double lr = -5; lr <= 690; lr += 0.5) {
    const double v = u2.log_u(std::exp(lr));
    REQUIRE(std::isfinite(v));
    CHECK(v >= prev);
    prev = v;
  }
  // second differences of log u(e^s) stay nonnegative where the table ends
  for (double lr = 9.0; lr < 14.0; lr += 0.05) {
    const double a = u2.log_u(std::exp(lr - 0.05)), b = u2.log_u(std::exp(lr)), c = u2.log_u(std::exp(lr + 0.05));
    CHECK(a + c - 2 * b >= -1e-9 * std::abs(b));
  }
}

TEST_CASE("power series evaluation is a stable log-sum-exp") {
  GrowthFunction f(exp_r_squared_series(400));
  for (double r : {0.0, 0.5, 3.0, 10.0}) CHECK(f.log_u(r) == doctest::Approx(r * r).epsilon(1e-13));
  CHECK(f.validity_cap() > 10.0);
  CHECK(f.validity_cap() < 20.0);
}

TEST_CASE("iterated_log") {
  CHECK(iterated_log(1, std::numbers::e) == doctest::Approx(1.0));
  CHECK(iterated_log(1, 0.5) == 1.0);
  CHECK(iterated_log(1, -3.0) == 1.0);
  CHECK(iterated_log(2, std::exp(std::numbers::e)) == doctest::Approx(1.0));
  CHECK(iterated_log(3, 1e100) == doctest::Approx(std::log(std::log(100 * std::log(10.0)))));
  CHECK_THROWS_AS(iterated_log(0, 1.0), ParameterError);
}

TEST_CASE("conditions on the catalog") {
  for (const auto& spec : catalog()) {
    GrowthFunction f(spec);
    const auto rep = check_conditions(f);
    CAPTURE(spec.id);
    for (Condition c : {Condition::U0, Condition::U1, Condition::U2, Condition::U3}) {
      CAPTURE(to_string(c));
      CHECK(rep.status(c) == Status::Pass);
    }
    CHECK(rep.status(Condition::CPlusHalf) == Status::Pass);
    CHECK(rep.claims_hold(f));
    CHECK(f.grid_inf_log_u() == doctest::Approx(0.0));
    CHECK(f.grid_inf_r() == 0.0);
  }
}

TEST_CASE("e^{r^2} fails U2 with a witness") {
  GrowthFunction f(exp_r_squared_series(400));
  const auto rep = check_conditions(f);
  CHECK(rep.status(Condition::U2) == Status::Fail);
  CHECK(rep.at(Condition::U2).witness_r > 1.0);
  const auto j = rep.to_json();
  CHECK(j["conditions"][2]["condition"] == "U2");
  CHECK(j["conditions"][2]["status"] == "fail");
}

TEST_CASE("condition failures carry witnesses") {
  // u = 2 + r: inf u = 2 fails U0, hence U1
  GrowthFunction f(power_series("shifted", {std::log(2.0), 0.0}));
  const auto rep = check_conditions(f, linear_grid(0.0, 5.0, 11));
  CHECK(rep.status(Condition::U0) == Status::Fail);
  CHECK(rep.status(Condition::U1) == Status::Fail);
  CHECK(rep.at(Condition::U0).witness_r == 0.0);
  // u = 1 + r grows slower than e^{sqrt r}
  GrowthFunction slow(power_series("linear", {0.0, 0.0}, true));
  CHECK(slow.validity_cap() == kInf);
  const auto srep = check_conditions(slow);
  CHECK(srep.status(Condition::U1) == Status::Pass);
  CHECK(srep.status(Condition::CPlusHalf) == Status::Fail);
  CHECK(srep.at(Condition::CPlusHalf).witness_r > 1.0);
  CHECK_THROWS_AS(check_conditions(f, Grid{}), ParameterError);
}

TEST_CASE("U1 pass implies U0 pass") {
  for (const auto& spec : {kondratiev_streit(0.25), bell_series(3), power_series("p", {0.0, 0.0, -1.0})}) {
    const auto rep = check_conditions(GrowthFunction(spec));
    if (rep.status(Condition::U1) == Status::Pass) CHECK(rep.status(Condition::U0) == Status::Pass);
  }
}

TEST_CASE("g_k sandwich: g_k <= C g_{k-1} on [1, 1e8]") {
  for (int k : {3, 4}) {
    GrowthFunction hi(iterated_exp_sqrt(k - 1)), lo(iterated_exp_sqrt(k));
    double worst = -kInf;
    for (double r : geometric_grid(1.0, 1e8, 400).points) worst = std::max(worst, lo.log_u(r) - hi.log_u(r));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("spec JSON round trip") {
  const auto j = nlohmann::json::parse(R"({"kind": "kondratiev_streit", "beta": 0.5, "claims": ["U0", "U3"]})");
  const auto s = spec_from_json(j, "ks");
  CHECK(s.id == "ks");
  CHECK(std::get<KondratievStreit>(s.kind).beta == 0.5);
  CHECK(s.claimed.size() == 2);
  const auto back = spec_from_json(to_json(s), "ks");
  CHECK(back.claimed == s.claimed);
  const auto p = spec_from_json(nlohmann::json::parse(R"({"kind": "power_series", "log_coeffs": [0, null, 0]})"), "p");
  CHECK(std::get<PowerSeries>(p.kind).log_coeffs[1] == -kInf);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(R"({"kind": "nope"})"), "x"), SchemaError);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(R"({"kind": "kondratiev_streit", "beta": 1.5})"), "x"),
                  ParameterError);
}

TEST_CASE("Mittag-Leffler anchors") {
  for (double t = 0.0; t <= 20.0; t += 0.25) CHECK(mittag_leffler(1.0, t) == doctest::Approx(std::exp(-t)).epsilon(1e-12));
  CHECK(mittag_leffler(0.3, 0.0) == 1.0);
  for (double t = 0.0; t <= 5.0; t += 0.125) {
    const double ref = std::exp(t * t) * std::erfc(t);
    CHECK(std::abs(mittag_leffler(0.5, t) - ref) <= 1e-8);
  }
  CHECK(mittag_leffler(0.5, 1.0) == doctest::Approx(0.42758357615580700441).epsilon(1e-12));
  CHECK(mittag_leffler(0.5, 5.0) == doctest::Approx(0.11070463773306862637).epsilon(1e-10));
  CHECK(mittag_leffler(0.3, 0.25) == doctest::Approx(0.77807454640151807201).epsilon(1e-10));
  CHECK(mittag_leffler(0.3, 4.0) == doctest::Approx(0.16650174431551664971).epsilon(1e-10));
  CHECK(mittag_leffler(0.7, 1.0) == doctest::Approx(0.39961197811559939027).epsilon(1e-10));
  CHECK(mittag_leffler(0.7, 4.0) == doctest::Approx(0.099760254890514628716).epsilon(1e-10));
  CHECK_THROWS_AS(mittag_leffler(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(mittag_leffler(1.2, 1.0), ParameterError);
  CHECK_THROWS_AS(mittag_leffler(0.5, -1.0), ParameterError);
}

TEST_CASE("Mittag-Leffler series and spectral paths agree where both apply") {
  for (double lambda : {0.2, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    for (double t = 0.05; t < 40.0; t *= 1.3) {
      if (mittag_leffler_log_max_term(lambda, t) >= std::log(1e8)) break;
      CAPTURE(lambda);
      CAPTURE(t);
      CHECK(std::abs(mittag_leffler_series(lambda, t) - mittag_leffler_spectral(lambda, t)) <= 1e-8);
    }
  }
}

TEST_CASE("Mittag-Leffler is positive, decreasing and convex on grids") {
  for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    std::vector<double> v;
    for (double t = 0.0; t <= 30.0; t += 0.1) v.push_back(mittag_leffler(lambda, t));
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v[i] > 0.0);
      CHECK(v[i] <= 1.0);
      if (i > 0) CHECK(v[i] < v[i - 1]);
      if (i > 1) CHECK(v[i] + v[i - 2] - 2 * v[i - 1] >= -1e-12);
    }
  }
}
