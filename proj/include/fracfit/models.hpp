#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracfit/specfun.hpp"

// The three phenomena, each in a classical and a fractional variant, behind
// a uniform t -> M(t; theta) evaluation interface used by the fitter.

namespace fracfit::models {

using specfun::SeriesConfig;

// ---------------------------------------------------------------------------
// Parameter structs and direct model functions
// ---------------------------------------------------------------------------

/// Exponential / Mittag-Leffler growth. n0 > 0, alpha in (0,2).
struct PopulationParams {
    double n0 = 1.0;     ///< population at t = 0
    double p = 0.0;      ///< net production rate, 1/time
    double alpha = 1.0;  ///< fractional order (1 = classical)
};

/// Two-compartment kinetics. Rates positive, orders in (0,2).
struct BalParams {
    double a0 = 1.0;  ///< ingested amount (first-compartment initial value)
    double k1 = 1.0;  ///< first-compartment elimination rate
    double k2 = 1.0;  ///< second-compartment elimination rate
    double alpha = 1.0;
    double beta = 1.0;
};

/// Tape-counter model. p, b > 0, alpha in (0,2). The classical closed form
/// uses the derived amplitude a = 2p/b.
struct TapeParams {
    double p = 1.0;  ///< kv/R(0): counts per unit time^alpha
    double b = 1.0;  ///< cv/(pi R(0)^2): inverse time scale
    double alpha = 1.0;
};

double population_classical(double t, const PopulationParams& q);
double population_fractional(double t, const PopulationParams& q,
                             const SeriesConfig& cfg = {});

double bal_classical_A(double t, const BalParams& q);
/// Throws DegenerateParametersError when |k1 - k2| < 1e-12 (pole in the
/// closed form).
double bal_classical_B(double t, const BalParams& q);

double bal_fractional_A(double t, const BalParams& q,
                        const SeriesConfig& cfg = {});

/// Truncated double series
///
///   B(t) = k1 A0 sum_{m=0}^K sum_{n=0}^K (-k1)^m (-k2)^n
///          t^(m alpha + n beta + beta) / Gamma(n beta + beta + m alpha + 1)
///
/// with K = cfg.double_series_order. Terms are formed in log space and
/// accumulated with compensation; B(0) = 0 by construction (every exponent
/// of t is positive). Throws OverflowError when any term's log exceeds the
/// representable range.
double bal_fractional_B(double t, const BalParams& q,
                        const SeriesConfig& cfg = {});

/// Batch form of bal_fractional_B: the per-parameter series plan (the
/// Gamma-function table) is built once and reused across all time points.
std::vector<double> bal_fractional_B_many(std::span<const double> ts,
                                          const BalParams& q,
                                          const SeriesConfig& cfg = {});

double tape_classical(double t, const TapeParams& q);

/// n(t) = p / Gamma(alpha) * int_0^t (t-s)^(alpha-1) / sqrt(b s + 1) ds,
/// evaluated after the substitution w = (t-s)^alpha (which removes the
/// endpoint singularity) by adaptive Gauss-Legendre quadrature to the given
/// absolute tolerance on the transformed integral. Throws ConvergenceError
/// when the panel-subdivision budget is exhausted.
double tape_fractional(double t, const TapeParams& q, double quad_tol = 1e-10);

/// Closed-form Caputo derivative of y(t) = t: t^(1-alpha)/Gamma(2-alpha)
/// for alpha in (0,1), 1 at alpha = 1, and 0 for alpha in (1,2).
double caputo_of_t_curve(double t, double alpha);

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

struct ParamDef {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    bool fixed = false;
    double fixed_value = 0.0;
    /// Positive scale parameter: multi-start sampling works in log space.
    bool log_scale = false;
};

/// A named parametric model: ordered parameter definitions, box bounds,
/// a default start point, and a deterministic evaluation map. Immutable
/// after construction and safe to share across threads.
class ModelSpec {
public:
    using EvalFn = std::function<double(double, std::span<const double>,
                                        const SeriesConfig&)>;
    using EvalManyFn = std::function<std::vector<double>(
        std::span<const double>, std::span<const double>, const SeriesConfig&)>;

    ModelSpec(std::string name, std::vector<ParamDef> params,
              std::vector<double> default_start, SeriesConfig cfg,
              EvalFn eval, EvalManyFn eval_many = nullptr);

    const std::string& name() const { return name_; }
    std::span<const ParamDef> params() const { return params_; }
    const SeriesConfig& series_config() const { return cfg_; }
    std::span<const double> default_start() const { return default_start_; }
    std::size_t size() const { return params_.size(); }

    double evaluate(double t, std::span<const double> theta) const;
    std::vector<double> evaluate_many(std::span<const double> ts,
                                      std::span<const double> theta) const;

    /// Copy with tightened/relocated box bounds for one free parameter
    /// (the default start is clamped into the new box). Throws DomainError
    /// for unknown or fixed parameters.
    ModelSpec with_param_bounds(std::string_view param, double lower,
                                double upper) const;

private:
    std::string name_;
    std::vector<ParamDef> params_;
    std::vector<double> default_start_;
    SeriesConfig cfg_;
    EvalFn eval_;
    EvalManyFn eval_many_;
};

/// Names accepted by make_model, in registry order.
std::vector<std::string> model_names();

/// Builds a registry model; throws UnknownModelError for other names.
/// Models: population-classical, population-fractional, bal-classical,
/// bal-fractional, tape-classical, tape-fractional.
ModelSpec make_model(std::string_view name, const SeriesConfig& cfg = {});

}  // namespace fracfit::models
