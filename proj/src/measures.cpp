#include "hida/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hida/errors.hpp"
#include "hida/grid.hpp"
#include "hida/numerics.hpp"

namespace hida {

using nlohmann::json;

FerniqueResult fernique_product(double rho, double q, double c2, double tail_tol) {
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("fernique_product: rho must lie in (0, 1)");
  if (!(q >= 0.0)) throw ParameterError("fernique_product: q must be >= 0");
  if (!(c2 >= 0.0)) throw ParameterError("fernique_product: c2 must be >= 0");
  if (!(tail_tol > 0.0)) throw ParameterError("fernique_product: tail_tol must be > 0");
  FerniqueResult out;
  if (c2 == 0.0) return out;
  const double ratio = std::pow(rho, 2.0 * q);
  const double x1 = 4.0 * c2 * ratio;
  // q = 0 gives infinitely many equal factors > 1
  if (x1 >= 1.0 || ratio >= 1.0) {
    out.finite = false;
    out.value = kInf;
    out.log_value = kInf;
    out.log_tail_bound = kInf;
    return out;
  }
  CompensatedSum<double> s;
  double x = x1;
  for (;;) {
    s.add(-0.5 * std::log1p(-x));
    ++out.factors;
    const double next = x * ratio;
    // -log(1 - y) <= y / (1 - y), summed geometrically over the remaining factors
    out.log_tail_bound = 0.5 * next / ((1.0 - next) * (1.0 - ratio));
    x = next;
    if (out.log_tail_bound < tail_tol) break;
  }
  out.log_value = s.value();
  out.value = std::exp(out.log_value);
  return out;
}

double fernique_partial_log(double rho, double q, double c2, int factors) {
  CompensatedSum<double> s;
  const double ratio = std::pow(rho, 2.0 * q);
  double x = 4.0 * c2 * ratio;
  for (int k = 0; k < factors; ++k, x *= ratio) s.add(-0.5 * std::log1p(-x));
  return s.value();
}

json PoissonResult::to_json() const {
  return {{"value", integrable ? json(value) : json(nullptr)},
          {"log_value", std::isfinite(log_value) ? json(log_value) : json(nullptr)},
          {"terms", terms},
          {"tail_bound", std::isfinite(tail_bound) ? json(tail_bound) : json(nullptr)},
          {"integrable", integrable},
          {"detail", detail}};
}

PoissonResult poisson_integrability(double theta, const std::function<double(int)>& log_g, double tail_tol,
                                    int max_terms) {
  if (!(theta > 0.0)) throw ParameterError("poisson_integrability: theta must be > 0");
  if (!(tail_tol > 0.0)) throw ParameterError("poisson_integrability: tail_tol must be > 0");
  PoissonResult out;
  LogSumExp acc;
  const double lt = std::log(theta);
  double prev = kNegInf;
  int small_ratios = 0, growing = 0;
  for (int k = 0; k < max_terms; ++k) {
    const double tau = log_g(k) - theta + k * lt - std::lgamma(k + 1.0);
    if (std::isnan(tau)) throw ParameterError("poisson_integrability: integrand is NaN at k = " + std::to_string(k));
    acc.add(tau);
    out.terms = k + 1;
    const double step = tau - prev;
    prev = tau;
    if (k == 0) continue;
    small_ratios = step <= -std::numbers::ln2 ? small_ratios + 1 : 0;
    growing = step >= 0.0 ? growing + 1 : 0;
    if (small_ratios >= 5) {
      // ratios assumed non-increasing from here: geometric tail
      const double q = std::exp(step);
      out.tail_bound = std::exp(tau) * q / (1.0 - q);
      if (out.tail_bound < tail_tol) {
        out.integrable = true;
        break;
      }
    }
    if (growing >= 50 && k > 2.0 * theta + 50.0) {
      out.detail = "terms grow for 50 consecutive k beyond k = " + std::to_string(k - 50) + "; not integrable";
      out.tail_bound = kInf;
      break;
    }
  }
  out.log_value = acc.value();
  out.value = std::exp(out.log_value);
  if (!out.integrable && out.detail.empty()) {
    out.detail = "tail not certified within " + std::to_string(max_terms) + " terms";
    out.tail_bound = kInf;
  }
  return out;
}

double log_g_example(int k) {
  return k * std::sqrt(std::log(std::max(std::numbers::e, static_cast<double>(k))));
}

std::function<double(int)> growth_integrand(const GrowthFunction& f, double w) {
  if (!(w >= 0.0)) throw ParameterError("growth_integrand: w must be >= 0");
  return [f, w](int k) { return 0.5 * f.log_u(w * static_cast<double>(k) * k); };
}

json MCEstimate::to_json() const {
  return {{"value", std::isfinite(value) ? json(value) : json(nullptr)},
          {"stderr", std::isfinite(stderr_) ? json(stderr_) : json(nullptr)},
          {"n", n},
          {"seed", seed},
          {"stable", stable}};
}

namespace {

constexpr std::size_t kBatch = 1 << 16;

// Independent stream per batch, derived from the root seed only.
std::mt19937_64 batch_engine(std::uint64_t seed, std::size_t batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)};
  return std::mt19937_64(seq);
}

// mean and standard error of already computed values
std::pair<double, double> mean_stderr(std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  for (double& x : v) x = (x - mean) * (x - mean);
  const double var = v.size() > 1 ? pairwise_sum(v) / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace

std::vector<double> grey_sample(double lambda, std::size_t n, std::uint64_t seed) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ParameterError("grey_sample: lambda must lie in (0, 1]");
  if (n < 1) throw ParameterError("grey_sample: n must be >= 1");
  std::vector<double> out(n);
  const std::size_t batches = (n + kBatch - 1) / kBatch;
  parallel_for(batches, default_jobs(), [&](std::size_t b) {
    auto eng = batch_engine(seed, b);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, std::numbers::pi);
    std::exponential_distribution<double> expo;
    const std::size_t end = std::min(n, (b + 1) * kBatch);
    for (std::size_t i = b * kBatch; i < end; ++i) {
      double s = 1.0;
      if (lambda < 1.0) {
        double u;
        do u = uniform(eng);
        while (u <= 0.0);
        const double e = expo(eng);
        // S = T^{-lambda} with T = sin(lU)/sin(U)^{1/l} (sin((1-l)U)/E)^{(1-l)/l}
        const double log_s = std::log(std::sin(u)) - lambda * std::log(std::sin(lambda * u)) +
                             (1.0 - lambda) * (std::log(e) - std::log(std::sin((1.0 - lambda) * u)));
        s = std::exp(log_s);
      }
      out[i] = std::sqrt(2.0 * s) * normal(eng);
    }
  });
  return out;
}

MCEstimate empirical_cf(const std::vector<double>& samples, double xi, std::uint64_t seed) {
  if (samples.empty()) throw ParameterError("empirical_cf: no samples");
  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(xi * samples[i]);
  MCEstimate e;
  std::tie(e.value, e.stderr_) = mean_stderr(v);
  e.n = samples.size();
  e.seed = seed;
  return e;
}

MCEstimate grey_integrability(double lambda, double w, const std::vector<double>& samples, std::uint64_t seed) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ParameterError("grey_integrability: lambda must lie in (0, 1]");
  if (!(w >= 0.0)) throw ParameterError("grey_integrability: w must be >= 0");
  if (samples.empty()) throw ParameterError("grey_integrability: no samples");
  const double expo = 1.0 / (2.0 - lambda);
  std::vector<double> logs(samples.size());
  for (std::size_t i = 0; i < logs.size(); ++i)
    logs[i] = 0.5 * (2.0 - lambda) * std::pow(w * samples[i] * samples[i], expo);

  MCEstimate e;
  e.n = samples.size();
  e.seed = seed;
  const double m = *std::max_element(logs.begin(), logs.end());
  std::vector<double> scaled(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) scaled[i] = std::exp(logs[i] - m);

  const std::size_t top = std::max<std::size_t>(1, (scaled.size() + 999) / 1000);
  std::vector<double> sorted = scaled;
  std::nth_element(sorted.begin(), sorted.end() - top, sorted.end());
  const double top_sum = pairwise_sum(std::span<const double>(sorted.data() + sorted.size() - top, top));
  const double all_sum = pairwise_sum(scaled);
  e.stable = scaled.size() > top && top_sum <= 0.5 * all_sum && m < 700.0;

  auto [mean, se] = mean_stderr(scaled);
  e.value = std::exp(m) * mean;
  e.stderr_ = std::exp(m) * se;
  return e;
}

MCEstimate grey_integrability(double lambda, double w, std::size_t n, std::uint64_t seed) {
  return grey_integrability(lambda, w, grey_sample(lambda, n, seed), seed);
}

std::vector<double> default_p_sweep() {
  std::vector<double> p;
  for (int i = 0; i <= 16; ++i) p.push_back(0.5 * i);
  return p;
}

namespace {

VerificationReport condition_report(const GrowthFunction& f, double p, bool finite, json constants,
                                    std::optional<double> smallest, std::string detail) {
  VerificationReport rep;
  rep.check = "hida_condition";
  rep.function_id = f.id();
  rep.grid = {{"p", p}};
  rep.worst_margin = finite ? 0.0 : kNegInf;
  rep.pass = finite;
  constants["p"] = p;
  constants["finite"] = finite;
  constants["smallest_finite_p"] = smallest ? json(*smallest) : json(nullptr);
  rep.constants = std::move(constants);
  rep.detail = std::move(detail);
  return rep;
}

// log of sup_r u(r)^{1/2} e^{-2 c2 r}, or +inf if the grid maximum is not interior
double gaussian_log_k(const GrowthFunction& f, double c2) {
  const Grid g = clip(default_r_grid(), 0.0, f.validity_cap());
  std::vector<double> v;
  for (double r : g.points) v.push_back(0.5 * f.log_u(r) - 2.0 * c2 * r);
  const auto it = std::max_element(v.begin(), v.end());
  if (v.size() < 3 || it >= v.end() - 3) return kInf;
  return *it;
}

}  // namespace

VerificationReport hida_condition(const MeasureSurrogate& m, const GrowthFunction& f, double p,
                                  const std::vector<double>& p_sweep) {
  if (!(p >= 0.0)) throw ParameterError("hida_condition: p must be >= 0");
  const auto* ks = std::get_if<KondratievStreit>(&f.spec().kind);
  const auto* ies = std::get_if<IteratedExpSqrt>(&f.spec().kind);

  if (const auto* g = std::get_if<GaussianProduct>(&m)) {
    if (!ks) throw ParameterError("hida_condition: the Gaussian surrogate pairs with Kondratiev-Streit functions");
    const double log_k = gaussian_log_k(f, g->c2);
    auto at = [&](double q) {
      const auto fp = fernique_product(g->rho, q, g->c2);
      return std::pair{fp, fp.finite && std::isfinite(log_k)};
    };
    const auto [fp, finite] = at(p);
    std::optional<double> smallest;
    for (double q : p_sweep)
      if (at(q).second) {
        smallest = q;
        break;
      }
    json c{{"surrogate", "gaussian"}, {"rho", g->rho}, {"c2", g->c2},
           {"log_K", std::isfinite(log_k) ? json(log_k) : json(nullptr)},
           {"fernique", fp.finite ? json(fp.value) : json(nullptr)}};
    if (finite) c["bound"] = std::exp(log_k) * fp.value;
    std::string detail;
    if (!std::isfinite(log_k))
      detail = "u^{1/2} is not dominated by exp(2 c2 r)";
    else if (!fp.finite)
      detail = "Fernique product diverges: 4 c2 rho^{2p} >= 1";
    return condition_report(f, p, finite, std::move(c), smallest, std::move(detail));
  }

  if (const auto* pc = std::get_if<PoissonCount>(&m)) {
    if (!ies || ies->k != 2) throw ParameterError("hida_condition: the Poisson surrogate pairs with g_2");
    auto growth_form = [&](double q) {
      return poisson_integrability(pc->theta, growth_integrand(f, std::pow(pc->rho, 2.0 * q)));
    };
    const PoissonResult grown = growth_form(p);
    const PoissonResult example = poisson_integrability(pc->theta, log_g_example);
    std::optional<double> smallest;
    for (double q : p_sweep)
      if (growth_form(q).integrable) {
        smallest = q;
        break;
      }
    json c{{"surrogate", "poisson"}, {"theta", pc->theta}, {"w", std::pow(pc->rho, 2.0 * p)},
           {"growth_form", grown.to_json()}, {"example_form", example.to_json()}};
    const bool finite = grown.integrable && example.integrable;
    return condition_report(f, p, finite, std::move(c), smallest, finite ? "" : grown.detail + example.detail);
  }

  const auto& gr = std::get<Grey1D>(m);
  if (!ks || std::abs(ks->beta - (1.0 - gr.lambda)) > 1e-12)
    throw ParameterError("hida_condition: grey noise with lambda pairs with the Kondratiev-Streit beta = 1 - lambda");
  const auto samples = grey_sample(gr.lambda, gr.n, gr.seed);
  const MCEstimate est = grey_integrability(gr.lambda, std::pow(gr.rho, 2.0 * p), samples, gr.seed);
  std::optional<double> smallest;
  for (double q : p_sweep)
    if (grey_integrability(gr.lambda, std::pow(gr.rho, 2.0 * q), samples, gr.seed).stable) {
      smallest = q;
      break;
    }
  json c{{"surrogate", "grey"}, {"lambda", gr.lambda}, {"w", std::pow(gr.rho, 2.0 * p)}, {"estimate", est.to_json()}};
  return condition_report(f, p, est.stable, std::move(c), smallest,
                          est.stable ? "" : "estimator dominated by its largest samples");
}

}  // namespace hida
