#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hida/errors.hpp"
#include "hida/measures.hpp"
#include "hida/mittag_leffler.hpp"

using namespace hida;

TEST_CASE("Fernique product") {
  CHECK(fernique_product(0.5, 1.0, 0.0).value == 1.0);
  CHECK(fernique_product(0.3, 2.0, 0.0).value == 1.0);

  const auto f = fernique_product(0.5, 1.0, 0.1);
  CHECK(f.finite);
  CHECK(f.value == doctest::Approx(1.0719895202158901229).epsilon(1e-13));
  CHECK(std::abs(fernique_partial_log(0.5, 1.0, 0.1, 2 * f.factors) - f.log_value) < 1e-10);

  CHECK_FALSE(fernique_product(0.5, 1.0, 1.0).finite);
  CHECK_FALSE(fernique_product(0.5, 1.0, 1.5).finite);
  CHECK(fernique_product(0.5, 1.0, 0.999).finite);
  CHECK_FALSE(fernique_product(0.5, 0.0, 0.01).finite);
  CHECK_THROWS_AS(fernique_product(1.0, 1.0, 0.1), ParameterError);
}

TEST_CASE("Poisson integrability") {
  const auto mass = poisson_integrability(1.0, [](int) { return 0.0; });
  CHECK(mass.integrable);
  CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-11));

  const auto ex = poisson_integrability(1.0, log_g_example);
  CHECK(ex.integrable);
  CHECK(ex.terms <= 300);
  CHECK(ex.tail_bound < 1e-12);
  CHECK(ex.value == doctest::Approx(12.875106396491966038).epsilon(1e-12));

  // e^{-1} sum g(k)/k! for g = k! 2^k: terms 2^k e^{-1}
  const auto bad = poisson_integrability(1.0, [](int k) { return std::lgamma(k + 1.0) + k * std::numbers::ln2; });
  CHECK_FALSE(bad.integrable);
  CHECK_FALSE(bad.detail.empty());
  CHECK(bad.to_json()["value"].is_null());

  // partial sums increase and settle: more terms never lowers the sum
  double prev = 0.0;
  for (int terms : {5, 10, 20, 40}) {
    const auto part = poisson_integrability(1.0, log_g_example, 1e-300, terms);
    CHECK(part.value >= prev);
    prev = part.value;
  }
  CHECK(prev == doctest::Approx(ex.value).epsilon(1e-12));

  GrowthFunction g2(iterated_exp_sqrt(2));
  CHECK(poisson_integrability(3.0, growth_integrand(g2, 1.0)).integrable);
}

TEST_CASE("grey-noise sampler") {
  const auto a = grey_sample(0.5, 1, 99);
  const auto b = grey_sample(0.5, 1, 99);
  CHECK(a == b);
  CHECK(grey_sample(0.5, 1, 100) != a);
  // batches are seeded independently of the sample count
  const auto longer = grey_sample(0.7, 200000, 5);
  const auto shorter = grey_sample(0.7, 70000, 5);
  CHECK(std::equal(shorter.begin(), shorter.end(), longer.begin()));

  for (double lambda : {0.3, 0.5, 0.7, 1.0}) {
    const auto s = grey_sample(lambda, 1000000, 20240601);
    for (double xi : {0.5, 1.0, 2.0}) {
      const auto e = empirical_cf(s, xi, 20240601);
      CAPTURE(lambda);
      CAPTURE(xi);
      CHECK(std::abs(e.value - mittag_leffler(lambda, xi * xi)) <= 3.0 * e.stderr_);
    }
  }
  CHECK_THROWS_AS(grey_sample(0.0, 10, 1), ParameterError);
  CHECK_THROWS_AS(grey_sample(1.2, 10, 1), ParameterError);
}

TEST_CASE("grey-noise integrability") {
  const auto g = grey_integrability(1.0, 0.1, 1000000, 20240601);
  CHECK(g.stable);
  CHECK(std::abs(g.value - 1.0 / std::sqrt(0.8)) <= 3.0 * g.stderr_);
  const auto j = g.to_json();
  CHECK(j["n"] == 1000000);
  CHECK(j["seed"] == 20240601u);

  const auto zero = grey_integrability(1.0, 0.0, 1000, 1);
  CHECK(zero.value == 1.0);
  CHECK(zero.stderr_ == 0.0);

  CHECK(grey_integrability(0.5, 0.05, 1000000, 20240601).stable);
  // E exp(a X^2) is infinite for X ~ N(0, 2) once a >= 1/4
  CHECK_FALSE(grey_integrability(1.0, 2.0, 100000, 3).stable);
}

TEST_CASE("Hida condition dispatch") {
  GrowthFunction g2(iterated_exp_sqrt(2));
  const auto poisson = hida_condition(PoissonCount{1.0, 0.5}, g2, 0.0);
  CHECK(poisson.pass);
  CHECK(poisson.constants["example_form"]["integrable"] == true);
  CHECK(poisson.constants["smallest_finite_p"] == 0.0);

  GrowthFunction u0(kondratiev_streit(0.0));
  const auto grey = hida_condition(Grey1D{1.0, 200000, 7, std::sqrt(0.1)}, u0, 1.0);
  CHECK(grey.pass);
  CHECK(grey.constants["w"].get<double>() == doctest::Approx(0.1));
  const auto grey_small_p = hida_condition(Grey1D{1.0, 200000, 7, 0.5}, u0, 0.0);
  CHECK_FALSE(grey_small_p.pass);
  CHECK(grey_small_p.constants["smallest_finite_p"].get<double>() > 0.0);

  GrowthFunction u5(kondratiev_streit(0.5));
  const auto gauss = hida_condition(GaussianProduct{0.5, 0.1}, u5, 1.0);
  CHECK(gauss.pass);
  const auto edge = hida_condition(GaussianProduct{0.5, 1.0}, u5, 1.0);
  CHECK_FALSE(edge.pass);
  CHECK(edge.constants["smallest_finite_p"] == 1.5);
  CHECK(edge.to_json()["status"] == "fail");

  CHECK_THROWS_AS(hida_condition(PoissonCount{}, u0, 0.0), ParameterError);
  CHECK_THROWS_AS(hida_condition(Grey1D{0.5, 10, 1, 0.5}, u0, 0.0), ParameterError);
  CHECK_THROWS_AS(hida_condition(GaussianProduct{}, g2, 0.0), ParameterError);
}
