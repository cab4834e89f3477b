#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hida/grid.hpp"
#include "hida/growth.hpp"
#include "hida/legendre.hpp"
#include "hida/report.hpp"

namespace hida {

/// l(n) l(n+2) <= l(n+1)^2 on an integer table.
VerificationReport check_log_concavity(const LegendreTable& table);

/// l(0) l(n+m) <= l(n) l(m) for all n, m <= pair_max with n+m in the table.
VerificationReport check_submultiplicativity(const LegendreTable& table, int pair_max = 60);

/// l(n) l(m) <= l(0) 2^{2(n+m)} l(n+m), same pairs.
VerificationReport check_supermultiplicativity(const LegendreTable& table, int pair_max = 60);

/// Midpoint convexity of log l(t) + 2 t log t on adjacent triples of a real t-table.
VerificationReport check_t2t_logconvex(const LegendreTable& table);

/// L(r) <= (ea / log a) u(ar) pointwise, and the witness C = max u(r) / L(4r),
/// which must be interior to the grid and stable under one refinement.
VerificationReport check_lfunction_sandwich(const GrowthFunction& f, const LFunctionEvaluator& ev, double a,
                                            const Grid& r_grid);

/// 2 log L(r) <= log l(0) + log L(8r).
VerificationReport check_lemma_square(const LFunctionEvaluator& ev, const Grid& r_grid);

/// log L(r) <= (1/2)(log l(0) + log(ea / log a) + log u(8ar)).
VerificationReport check_lemma_sqrt(const GrowthFunction& f, const LFunctionEvaluator& ev, double a,
                                    const Grid& r_grid);

/// Young's inequality log l(t) + t log r <= log u(r) for every table entry and
/// grid point, and attainment log l(t) + t log r*(t) = log u(r*(t)).
VerificationReport check_legendre_duality(const GrowthFunction& f, const LegendreTable& table, const Grid& r_grid);

/// A log-domain function with a domain limit, for equivalence searches.
struct LogFunction {
  std::string id;
  std::function<double(double)> log_f;
  double max_r = std::numeric_limits<double>::infinity();
};

LogFunction as_log_function(const GrowthFunction& f);
/// log L_u, limited to the evaluator's certified range.
LogFunction as_log_function(const LFunctionEvaluator& ev);
/// u^2.
LogFunction squared(const GrowthFunction& f);

struct EquivalenceWitness {
  bool found = false;
  double log_c1 = 0.0, a1 = 0.0, log_c2 = 0.0, a2 = 0.0;
};

/// Searches a1 in {1, 1/2, ..., 2^-12}, a2 in {1, 2, ..., 2^12} for
/// c1 f(a1 r) <= g(r) <= c2 f(a2 r). A constant is accepted only if the extremal
/// log-ratio is not still moving outward over the last tenth of the grid.
EquivalenceWitness find_equivalence(const LogFunction& f, const LogFunction& g, const Grid& r_grid);

/// find_equivalence on the grid and on refine(grid); passes iff both succeed
/// with the same a1, a2 and log-constants within 0.05.
VerificationReport equivalence_witness(const LogFunction& f, const LogFunction& g, const Grid& r_grid);
VerificationReport equivalence_witness(const GrowthFunction& f, const GrowthFunction& g, const Grid& r_grid);

/// Adjacent pairs of an ordered chain (smaller test space first): searches
/// a in {1, ..., 2^12} with l_first(n) <= C a^n l_second(n) for n <= n_max.
VerificationReport check_chain_order(const std::vector<LegendreTable>& tables, int n_max);

struct SuiteOptions {
  int pair_max = 60;
  int l_table_n_max = 1024;
  double a = 2.0;
  Grid r_grid = default_r_grid();
  Grid t_grid = geometric_grid(0.05, 60.0, 160);
  LegendreOptions legendre;
};

/// Tables used by the suite for one function.
struct SuiteTables {
  LegendreTable integer_table;  // t = 0..l_table_n_max
  LegendreTable real_table;     // t on SuiteOptions::t_grid
};

SuiteTables build_suite_tables(const GrowthFunction& f, const SuiteOptions& opt = {});

/// Every table-, L-function- and equivalence check for one function.
std::vector<VerificationReport> run_suite(const GrowthFunction& f, const SuiteTables& tables,
                                          const SuiteOptions& opt = {});
std::vector<VerificationReport> run_suite(const GrowthFunction& f, const SuiteOptions& opt = {});

/// Multiplies every stride-th entry of both suite tables by 1 + factor and by
/// 1 - factor, one entry at a time, and reports each corruption the suite
/// fails to catch (margin -1; a caught corruption scores 0).
VerificationReport corruption_sweep(const GrowthFunction& f, const SuiteTables& clean, const SuiteOptions& opt = {},
                                    std::size_t stride = 1, double factor = 0.01);

}  // namespace hida
