#pragma once

#include <cstdint>

namespace fracfit::specfun {

/// Truncation orders and tolerances shared by the series evaluators.
struct SeriesConfig {
    /// Hard cap on single-series terms.
    int max_terms = 200;
    /// Absolute bound below which the next series term stops the summation.
    double tail_tolerance = 1e-14;
    /// Upper index bound of the truncated double series (terms 0..order).
    int double_series_order = 45;

    /// Throws ValidationError unless max_terms >= double_series_order >= 1
    /// and tail_tolerance >= 0.
    void validate() const;
};

/// Gamma function. Defined for all reals except 0, -1, -2, ...;
/// throws DomainError there.
double gamma(double t);

/// Natural log of Gamma for t > 0; throws DomainError otherwise.
double ln_gamma(double t);

/// Euler Beta function B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), a,b > 0.
double beta(double a, double b);

/// One-parameter Mittag-Leffler function
///
///   E_alpha(t) = sum_{k>=0} t^k / Gamma(alpha k + 1),   alpha > 0.
///
/// Summed directly with term magnitudes formed in log space and
/// compensated accumulation in extended precision; truncated at the first
/// term whose absolute value drops below cfg.tail_tolerance. Throws
/// ConvergenceError if cfg.max_terms is exhausted while the next term is
/// still above 1e6 * cfg.tail_tolerance (or the partial sum is not finite).
double mittag_leffler(double alpha, double t, const SeriesConfig& cfg = {});

}  // namespace fracfit::specfun
