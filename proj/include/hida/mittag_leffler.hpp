#pragma once

namespace hida {

/// L_lambda(t) = E_lambda(-t) = sum_n (-t)^n / Gamma(1 + lambda n), 0 < lambda <= 1, t >= 0.
/// Uses the alternating series while its largest term is below 1e8 and the
/// spectral integral otherwise.
double mittag_leffler(double lambda, double t);

/// Direct series in extended precision with compensated summation.
double mittag_leffler_series(double lambda, double t);

/// (sin(lambda pi) / (lambda pi)) int_0^inf exp(-(t s)^{1/lambda}) / (s^2 + 2 s cos(lambda pi) + 1) ds.
/// Requires lambda < 1.
double mittag_leffler_spectral(double lambda, double t);

/// log of the largest series term, max_n [n log t - lgamma(1 + lambda n)].
double mittag_leffler_log_max_term(double lambda, double t);

}  // namespace hida
