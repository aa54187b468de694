#include "fracfit/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracfit/errors.hpp"
#include "fracfit/kernels.hpp"

namespace fracfit::models {

namespace {

void check_time(double t) {
    if (!(t >= 0.0)) throw DomainError("model evaluation requires t >= 0");
}

void check_order(double alpha, const char* name) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw DomainError(std::string(name) + " must lie in (0, 2), got " +
                          std::to_string(alpha));
    }
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw DomainError(std::string(name) + " must be positive, got " +
                          std::to_string(v));
    }
}

void validate(const PopulationParams& q) {
    check_positive(q.n0, "N0");
    check_order(q.alpha, "alpha");
    if (!std::isfinite(q.p)) throw DomainError("P must be finite");
}

void validate(const BalParams& q) {
    check_positive(q.a0, "A0");
    check_positive(q.k1, "k1");
    check_positive(q.k2, "k2");
    check_order(q.alpha, "alpha");
    check_order(q.beta, "beta");
}

void validate(const TapeParams& q) {
    check_positive(q.p, "p");
    check_positive(q.b, "b");
    check_order(q.alpha, "alpha");
}

// ---------------------------------------------------------------------------
// Double-series evaluation plan: per-parameter tables reused across t.
// ---------------------------------------------------------------------------

struct BalSeriesPlan {
    std::vector<double> log_coef;  // m ln k1 + n ln k2 - lnGamma(...)
    std::vector<double> t_power;   // m alpha + n beta + beta
    std::vector<double> sign;      // (-1)^(m+n)
    double scale;                  // k1 A0

    BalSeriesPlan(const BalParams& q, const SeriesConfig& cfg) {
        const int order = cfg.double_series_order;
        const std::size_t count = std::size_t(order + 1) * std::size_t(order + 1);
        log_coef.resize(count);
        t_power.resize(count);
        sign.resize(count);
        std::vector<double> gamma_args(count);
        const double ln_k1 = std::log(q.k1);
        const double ln_k2 = std::log(q.k2);
        std::size_t idx = 0;
        for (int m = 0; m <= order; ++m) {
            for (int n = 0; n <= order; ++n, ++idx) {
                const double power = double(m) * q.alpha + double(n + 1) * q.beta;
                t_power[idx] = power;
                gamma_args[idx] = power + 1.0;
                log_coef[idx] = double(m) * ln_k1 + double(n) * ln_k2;
                sign[idx] = ((m + n) & 1) ? -1.0 : 1.0;
            }
        }
        std::vector<double> lg(count);
        kernels::lgamma_batch(gamma_args, lg);
        for (std::size_t i = 0; i < count; ++i) log_coef[i] -= lg[i];
        scale = q.k1 * q.a0;
    }

    double eval(double t) const {
        if (t == 0.0) return 0.0;  // every term carries a positive power of t
        double max_exponent = 0.0;
        const double sum =
            kernels::exp_affine_sum(log_coef, t_power, sign, std::log(t), &max_exponent);
        if (max_exponent > 709.0) {
            throw OverflowError("bal_fractional_B: series term exceeds the "
                                "representable range (log term = " +
                                std::to_string(max_exponent) + ")");
        }
        return scale * sum;
    }
};

// ---------------------------------------------------------------------------
// Adaptive Gauss-Legendre quadrature for the tape integral.
// ---------------------------------------------------------------------------

struct GlNode {
    double x, w;
};

constexpr GlNode kGl15[15] = {
    {-9.87992518020485377e-01, 3.07532419961186465e-02},
    {-9.37273392400705951e-01, 7.03660474881080689e-02},
    {-8.48206583410427206e-01, 1.07159220467171773e-01},
    {-7.24417731360170070e-01, 1.39570677926153908e-01},
    {-5.70972172608538830e-01, 1.66269205816993781e-01},
    {-3.94151347077563385e-01, 1.86161000015561878e-01},
    {-2.01194093997434514e-01, 1.98431485327111246e-01},
    {0.00000000000000000e+00, 2.02578241925560898e-01},
    {2.01194093997434514e-01, 1.98431485327111246e-01},
    {3.94151347077563385e-01, 1.86161000015561878e-01},
    {5.70972172608538830e-01, 1.66269205816993781e-01},
    {7.24417731360170070e-01, 1.39570677926153908e-01},
    {8.48206583410427206e-01, 1.07159220467171773e-01},
    {9.37273392400705951e-01, 7.03660474881080689e-02},
    {9.87992518020485377e-01, 3.07532419961186465e-02},
};

constexpr int kQuadMaxDepth = 128;
constexpr long kQuadBudget = 500000;

template <class F>
double gl15(const F& f, double lo, double hi, long& evals) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double acc = 0.0;
    for (const auto& n : kGl15) acc += n.w * f(c + h * n.x);
    evals += 15;
    return h * acc;
}

template <class F>
double adapt(const F& f, double lo, double hi, double tol, double whole, int depth,
             long& evals) {
    if (evals > kQuadBudget) {
        throw ConvergenceError("quadrature: evaluation budget exhausted");
    }
    if (depth >= kQuadMaxDepth) {
        throw ConvergenceError("quadrature: subdivision depth exhausted");
    }
    const double mid = 0.5 * (lo + hi);
    const double left = gl15(f, lo, mid, evals);
    const double right = gl15(f, mid, hi, evals);
    const double refined = left + right;
    if (std::fabs(refined - whole) <= tol) return refined;
    return adapt(f, lo, mid, 0.5 * tol, left, depth + 1, evals) +
           adapt(f, mid, hi, 0.5 * tol, right, depth + 1, evals);
}

template <class F>
double adaptive_gl(const F& f, double lo, double hi, double tol) {
    long evals = 0;
    const double whole = gl15(f, lo, hi, evals);
    return adapt(f, lo, hi, tol, whole, 0, evals);
}

}  // namespace

// ---------------------------------------------------------------------------
// Model functions
// ---------------------------------------------------------------------------

double population_classical(double t, const PopulationParams& q) {
    check_time(t);
    validate(q);
    return q.n0 * std::exp(q.p * t);
}

double population_fractional(double t, const PopulationParams& q,
                             const SeriesConfig& cfg) {
    check_time(t);
    validate(q);
    return q.n0 * specfun::mittag_leffler(q.alpha, q.p * std::pow(t, q.alpha), cfg);
}

double bal_classical_A(double t, const BalParams& q) {
    check_time(t);
    validate(q);
    return q.a0 * std::exp(-q.k1 * t);
}

double bal_classical_B(double t, const BalParams& q) {
    check_time(t);
    validate(q);
    if (std::fabs(q.k1 - q.k2) < 1e-12) {
        throw DegenerateParametersError(
            "bal_classical_B: closed form is singular for k1 == k2");
    }
    return q.a0 * q.k1 / (q.k2 - q.k1) * (std::exp(-q.k1 * t) - std::exp(-q.k2 * t));
}

double bal_fractional_A(double t, const BalParams& q, const SeriesConfig& cfg) {
    check_time(t);
    validate(q);
    return q.a0 * specfun::mittag_leffler(q.alpha, -q.k1 * std::pow(t, q.alpha), cfg);
}

double bal_fractional_B(double t, const BalParams& q, const SeriesConfig& cfg) {
    check_time(t);
    validate(q);
    cfg.validate();
    return BalSeriesPlan(q, cfg).eval(t);
}

std::vector<double> bal_fractional_B_many(std::span<const double> ts,
                                          const BalParams& q,
                                          const SeriesConfig& cfg) {
    validate(q);
    cfg.validate();
    const BalSeriesPlan plan(q, cfg);
    std::vector<double> out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        check_time(ts[i]);
        out[i] = plan.eval(ts[i]);
    }
    return out;
}

double tape_classical(double t, const TapeParams& q) {
    check_time(t);
    validate(q);
    // a (sqrt(bt+1) - 1) with a = 2p/b, written to stay stable as b -> 0
    const double u = q.b * t;
    return 2.0 * q.p * t / (std::sqrt(1.0 + u) + 1.0);
}

double tape_fractional(double t, const TapeParams& q, double quad_tol) {
    check_time(t);
    validate(q);
    if (!(quad_tol > 0.0)) throw DomainError("tape_fractional: quad_tol must be positive");
    if (t == 0.0) return 0.0;
    // w = (t-s)^alpha turns the weakly singular kernel into dw/alpha and
    // leaves a bounded integrand on [0, t^alpha].
    const double inv_alpha = 1.0 / q.alpha;
    const auto integrand = [&](double w) {
        const double s = t - std::pow(w, inv_alpha);
        return 1.0 / std::sqrt(std::fmax(q.b * s + 1.0, 1e-300));
    };
    const double upper = std::pow(t, q.alpha);
    const double integral = adaptive_gl(integrand, 0.0, upper, quad_tol);
    return q.p / (specfun::gamma(q.alpha) * q.alpha) * integral;
}

double caputo_of_t_curve(double t, double alpha) {
    check_time(t);
    check_order(alpha, "alpha");
    if (alpha < 1.0) return std::pow(t, 1.0 - alpha) / specfun::gamma(2.0 - alpha);
    if (alpha == 1.0) return 1.0;
    return 0.0;
}

// ---------------------------------------------------------------------------
// ModelSpec and registry
// ---------------------------------------------------------------------------

ModelSpec::ModelSpec(std::string name, std::vector<ParamDef> params,
                     std::vector<double> default_start, SeriesConfig cfg,
                     EvalFn eval, EvalManyFn eval_many)
    : name_(std::move(name)),
      params_(std::move(params)),
      default_start_(std::move(default_start)),
      cfg_(cfg),
      eval_(std::move(eval)),
      eval_many_(std::move(eval_many)) {
    cfg_.validate();
    if (default_start_.size() != params_.size()) {
        throw DomainError("ModelSpec: default start size mismatch");
    }
    for (const auto& p : params_) {
        if (!p.fixed && !(p.lower < p.upper)) {
            throw DomainError("ModelSpec: free parameter '" + p.name +
                              "' needs lower < upper");
        }
    }
}

double ModelSpec::evaluate(double t, std::span<const double> theta) const {
    if (theta.size() != params_.size()) {
        throw DomainError("ModelSpec::evaluate: expected " +
                          std::to_string(params_.size()) + " parameters, got " +
                          std::to_string(theta.size()));
    }
    return eval_(t, theta, cfg_);
}

std::vector<double> ModelSpec::evaluate_many(std::span<const double> ts,
                                             std::span<const double> theta) const {
    if (theta.size() != params_.size()) {
        throw DomainError("ModelSpec::evaluate_many: parameter count mismatch");
    }
    if (eval_many_) return eval_many_(ts, theta, cfg_);
    std::vector<double> out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = eval_(ts[i], theta, cfg_);
    return out;
}

ModelSpec ModelSpec::with_param_bounds(std::string_view param, double lower,
                                       double upper) const {
    if (!(lower < upper)) {
        throw DomainError("with_param_bounds: need lower < upper");
    }
    auto params = params_;
    auto start = default_start_;
    bool found = false;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].name != param) continue;
        if (params[i].fixed) {
            throw DomainError("with_param_bounds: parameter '" + std::string(param) +
                              "' is fixed");
        }
        params[i].lower = lower;
        params[i].upper = upper;
        start[i] = std::clamp(start[i], lower, upper);
        found = true;
        break;
    }
    if (!found) {
        throw DomainError("with_param_bounds: no parameter named '" +
                          std::string(param) + "'");
    }
    return ModelSpec(name_, std::move(params), std::move(start), cfg_, eval_, eval_many_);
}

std::vector<std::string> model_names() {
    return {"population-classical", "population-fractional", "bal-classical",
            "bal-fractional",       "tape-classical",        "tape-fractional"};
}

namespace {

constexpr double kRateLo = 1e-6;
constexpr double kRateHi = 1e4;
constexpr double kOrderLo = 0.05;
constexpr double kOrderHi = 1.95;

ParamDef fixed_param(std::string name, double value) {
    return ParamDef{std::move(name), value, value, true, value, false};
}

ParamDef scale_param(std::string name) {
    return ParamDef{std::move(name), kRateLo, kRateHi, false, 0.0, true};
}

ParamDef order_param(std::string name) {
    return ParamDef{std::move(name), kOrderLo, kOrderHi, false, 0.0, false};
}

}  // namespace

ModelSpec make_model(std::string_view name, const SeriesConfig& cfg) {
    if (name == "population-classical") {
        return ModelSpec(
            "population-classical", {fixed_param("N0", 1750.0), scale_param("P")},
            {1750.0, 0.02}, cfg,
            [](double t, std::span<const double> th, const SeriesConfig&) {
                return population_classical(t, {th[0], th[1], 1.0});
            });
    }
    if (name == "population-fractional") {
        return ModelSpec(
            "population-fractional",
            {fixed_param("N0", 1750.0), scale_param("P"), order_param("alpha")},
            {1750.0, 0.0135, 1.05}, cfg,
            [](double t, std::span<const double> th, const SeriesConfig& c) {
                return population_fractional(t, {th[0], th[1], th[2]}, c);
            });
    }
    if (name == "bal-classical") {
        return ModelSpec(
            "bal-classical",
            {scale_param("A0"), scale_param("k1"), scale_param("k2")},
            {250.0, 0.1, 0.02}, cfg,
            [](double t, std::span<const double> th, const SeriesConfig&) {
                return bal_classical_B(t, {th[0], th[1], th[2], 1.0, 1.0});
            });
    }
    if (name == "bal-fractional") {
        return ModelSpec(
            "bal-fractional",
            {scale_param("A0"), scale_param("k1"), scale_param("k2"),
             order_param("alpha"), order_param("beta")},
            {245.8769, 0.109456, 0.017727, 1.05, 1.05}, cfg,
            [](double t, std::span<const double> th, const SeriesConfig& c) {
                return bal_fractional_B(t, {th[0], th[1], th[2], th[3], th[4]}, c);
            },
            [](std::span<const double> ts, std::span<const double> th,
               const SeriesConfig& c) {
                return bal_fractional_B_many(ts, {th[0], th[1], th[2], th[3], th[4]}, c);
            });
    }
    if (name == "tape-classical") {
        return ModelSpec(
            "tape-classical", {scale_param("p"), scale_param("b")}, {1.0, 0.1}, cfg,
            [](double t, std::span<const double> th, const SeriesConfig&) {
                return tape_classical(t, {th[0], th[1], 1.0});
            });
    }
    if (name == "tape-fractional") {
        return ModelSpec(
            "tape-fractional",
            {scale_param("p"), scale_param("b"), order_param("alpha")},
            {10.8203, 0.0219, 1.05}, cfg,
            [](double t, std::span<const double> th, const SeriesConfig&) {
                return tape_fractional(t, {th[0], th[1], th[2]});
            });
    }
    throw UnknownModelError("unknown model: " + std::string(name));
}

}  // namespace fracfit::models
