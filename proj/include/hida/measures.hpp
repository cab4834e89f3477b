#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "hida/growth.hpp"
#include "hida/report.hpp"
#include "json.hpp"

namespace hida {

/// prod_{k>=0} (1 - 4 c2 rho^{2q(k+1)})^{-1/2}: E exp(2 c2 |x|_{-q}^2) under the
/// standard Gaussian on the weighted sequence space.
struct FerniqueResult {
  double value = 1.0;
  double log_value = 0.0;
  bool finite = true;
  int factors = 0;
  double log_tail_bound = 0.0;
};
FerniqueResult fernique_product(double rho, double q, double c2, double tail_tol = 1e-15);
/// The first `factors` factors only.
double fernique_partial_log(double rho, double q, double c2, int factors);

struct PoissonResult {
  double value = 0.0;
  double log_value = 0.0;
  int terms = 0;
  double tail_bound = 0.0;
  bool integrable = false;
  std::string detail;
  nlohmann::json to_json() const;
};
/// sum_k g(k) e^{-theta} theta^k / k!, with log g supplied.
PoissonResult poisson_integrability(double theta, const std::function<double(int)>& log_g, double tail_tol = 1e-12,
                                    int max_terms = 100000);
/// k sqrt(log max(e, k)).
double log_g_example(int k);
/// (1/2) log u(w k^2).
std::function<double(int)> growth_integrand(const GrowthFunction& f, double w);

struct MCEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool stable = true;
  nlohmann::json to_json() const;
};

/// X = sqrt(2S) Z, E[e^{-tS}] = E_lambda(-t); S from a positive lambda-stable
/// variable by Kanter's representation. Deterministic in (lambda, n, seed).
std::vector<double> grey_sample(double lambda, std::size_t n, std::uint64_t seed);
/// Sample mean of cos(xi X) with its standard error.
MCEstimate empirical_cf(const std::vector<double>& samples, double xi, std::uint64_t seed = 0);
/// Sample mean of exp((1/2)(2 - lambda)(w X^2)^{1/(2 - lambda)}); unstable if the
/// top 0.1% of samples carry more than half of the sum.
MCEstimate grey_integrability(double lambda, double w, std::size_t n, std::uint64_t seed);
MCEstimate grey_integrability(double lambda, double w, const std::vector<double>& samples, std::uint64_t seed = 0);

struct GaussianProduct {
  double rho = 0.5;
  double c2 = 0.1;
};
struct PoissonCount {
  double theta = 1.0;
  double rho = 0.5;  // norm weight w = rho^{2p}
};
struct Grey1D {
  double lambda = 0.5;
  std::size_t n = 1000000;
  std::uint64_t seed = 20240601;
  double rho = 0.5;
};
using MeasureSurrogate = std::variant<GaussianProduct, PoissonCount, Grey1D>;

/// Levels swept for the smallest p with a finite integral.
std::vector<double> default_p_sweep();

/// Finiteness of the integral of u(|x|_{-p}^2)^{1/2} for the pairs
/// (Gaussian, Kondratiev-Streit), (Poisson, g_2), (grey lambda, u_{1-lambda}).
VerificationReport hida_condition(const MeasureSurrogate& m, const GrowthFunction& f, double p,
                                  const std::vector<double>& p_sweep = default_p_sweep());

}  // namespace hida
