#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fracfit/dataio.hpp"
#include "fracfit/models.hpp"

// Bounded nonlinear least squares: a self-contained Levenberg-Marquardt
// minimizer with box projection, plus deterministic Latin-hypercube
// multi-start and the classical-vs-fractional efficiency metric.

namespace fracfit::fitting {

using dataio::TimeSeries;
using models::ModelSpec;

struct Bounds {
    double lower;
    double upper;
};

/// A point in parameter space with per-entry box bounds
/// (lower <= value <= upper enforced at construction).
class ParamVector {
public:
    ParamVector() = default;
    ParamVector(std::vector<double> values, std::vector<Bounds> bounds);

    /// Bounds and fixed values from the model definition, values from the
    /// model's default start.
    static ParamVector default_start(const ModelSpec& model);

    std::span<const double> values() const { return values_; }
    std::span<const Bounds> bounds() const { return bounds_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    void set(std::size_t i, double v);  ///< throws DomainError out of bounds

private:
    std::vector<double> values_;
    std::vector<Bounds> bounds_;
};

struct FitOptions {
    int max_iterations = 500;
    /// Max-norm threshold on the projected SSE gradient.
    double gradient_tol = 1e-8;
    /// Relative SSE decrease below which an accepted step means convergence.
    double sse_rel_tol = 1e-12;
    /// Forward-difference step: max(fd_step, fd_step * |theta_j|).
    double fd_step = 1e-7;
    double lambda_init = 1e-3;
    /// Worker threads for multi-start (0 = hardware concurrency).
    int threads = 0;
};

enum class StopReason {
    gradient,       ///< projected gradient max-norm under tolerance
    sse_decrease,   ///< accepted step decreased SSE by < sse_rel_tol rel.
    no_step,        ///< no decreasing step exists at maximal damping
    max_iterations  ///< iteration budget exhausted (converged = false)
};

const char* stop_reason_name(StopReason r);

struct FitResult {
    ParamVector best_params;
    double sse = 0.0;
    std::vector<double> residuals;  ///< observed - predicted, per point
    int iterations = 0;
    bool converged = false;
    StopReason stop_reason = StopReason::max_iterations;
    ParamVector start_point;  ///< multi-start provenance
    int start_index = 0;
    long n_evaluations = 0;  ///< model-curve evaluations (SSE + Jacobian)
};

/// Sum of squared residuals of the model at theta over the data
/// (compensated summation). Propagates model evaluation errors.
double sse(const ModelSpec& model, std::span<const double> theta,
           const TimeSeries& data);

/// Damped least squares (Levenberg-Marquardt) from a single start point.
/// Jacobian by forward finite differences; trial steps projected onto the
/// box; only strictly decreasing steps are accepted, so the returned SSE
/// never exceeds the start's. Model evaluation failures at trial points
/// reject the trial; a failure at the start point itself propagates.
FitResult lm_fit(const ModelSpec& model, const ParamVector& start,
                 const TimeSeries& data, const FitOptions& opts = {});

/// Deterministic multi-start: start 0 is the model's default start, the
/// rest are Latin-hypercube samples of the box (log-spaced for positive
/// scale parameters), all derived from the seed. Starts run independently
/// (possibly in parallel); the result is the minimal-SSE fit with ties
/// broken by start index, so the outcome is reproducible for a fixed seed.
/// Throws FitError only if every start fails to evaluate.
FitResult multistart_fit(const ModelSpec& model, const TimeSeries& data,
                         int n_starts, std::uint64_t seed,
                         const FitOptions& opts = {});

/// |(e_classical - e_fractional) / e_classical|; requires e_classical > 0.
double efficiency_gain(double e_classical, double e_fractional);

}  // namespace fracfit::fitting
