#include "fracfit/fitting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "fracfit/errors.hpp"

namespace fracfit::fitting {

namespace {

constexpr double kLambdaMax = 1e15;
constexpr double kLambdaMin = 1e-12;

double sum_squares(std::span<const double> r) {
    double sum = 0.0, comp = 0.0;
    for (double x : r) {
        const double t = x * x;
        const double s = sum + t;
        comp += std::fabs(sum) >= std::fabs(t) ? (sum - s) + t : (t - s) + sum;
        sum = s;
    }
    return sum + comp;
}

// Gaussian elimination with partial pivoting; false when singular.
bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n,
                 std::span<double> out) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::fabs(a[col * n + col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double v = std::fabs(a[row * n + col]);
            if (v > best) {
                best = v;
                piv = row;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best)) return false;
        if (piv != col) {
            for (std::size_t k = col; k < n; ++k) std::swap(a[piv * n + k], a[col * n + k]);
            std::swap(b[piv], b[col]);
        }
        const double d = a[col * n + col];
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = a[row * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[row * n + k] -= f * a[col * n + k];
            b[row] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= a[i * n + k] * out[k];
        out[i] = acc / a[i * n + i];
        if (!std::isfinite(out[i])) return false;
    }
    return true;
}

struct Objective {
    const ModelSpec& model;
    std::vector<double> ts, ys;
    long evals = 0;

    Objective(const ModelSpec& m, const TimeSeries& data)
        : model(m), ts(data.times()), ys(data.values()) {}

    // predictions at theta; model errors propagate to the caller
    std::vector<double> predict(std::span<const double> theta) {
        ++evals;
        return model.evaluate_many(ts, theta);
    }

    double sse_of(std::span<const double> pred) const {
        double sum = 0.0, comp = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double r = pred[i] - ys[i];
            const double t = r * r;
            const double s = sum + t;
            comp += std::fabs(sum) >= std::fabs(t) ? (sum - s) + t : (t - s) + sum;
            sum = s;
        }
        return sum + comp;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// ParamVector
// ---------------------------------------------------------------------------

ParamVector::ParamVector(std::vector<double> values, std::vector<Bounds> bounds)
    : values_(std::move(values)), bounds_(std::move(bounds)) {
    if (values_.size() != bounds_.size()) {
        throw DomainError("ParamVector: values/bounds size mismatch");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(bounds_[i].lower <= bounds_[i].upper)) {
            throw DomainError("ParamVector: inverted bounds at index " + std::to_string(i));
        }
        if (!(values_[i] >= bounds_[i].lower && values_[i] <= bounds_[i].upper)) {
            throw DomainError("ParamVector: value " + std::to_string(values_[i]) +
                              " outside [" + std::to_string(bounds_[i].lower) + ", " +
                              std::to_string(bounds_[i].upper) + "] at index " +
                              std::to_string(i));
        }
    }
}

ParamVector ParamVector::default_start(const ModelSpec& model) {
    std::vector<double> vals(model.default_start().begin(), model.default_start().end());
    std::vector<Bounds> bounds;
    bounds.reserve(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto& p = model.params()[i];
        if (p.fixed) {
            bounds.push_back({p.fixed_value, p.fixed_value});
            vals[i] = p.fixed_value;
        } else {
            bounds.push_back({p.lower, p.upper});
            vals[i] = std::clamp(vals[i], p.lower, p.upper);
        }
    }
    return ParamVector(std::move(vals), std::move(bounds));
}

void ParamVector::set(std::size_t i, double v) {
    if (i >= values_.size()) throw DomainError("ParamVector::set: index out of range");
    if (!(v >= bounds_[i].lower && v <= bounds_[i].upper)) {
        throw DomainError("ParamVector::set: value outside bounds");
    }
    values_[i] = v;
}

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::gradient: return "gradient";
        case StopReason::sse_decrease: return "sse_decrease";
        case StopReason::no_step: return "no_step";
        case StopReason::max_iterations: return "max_iterations";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// SSE and the LM core
// ---------------------------------------------------------------------------

double sse(const ModelSpec& model, std::span<const double> theta,
           const TimeSeries& data) {
    data.validate();
    Objective obj(model, data);
    const auto pred = obj.predict(theta);
    return obj.sse_of(pred);
}

FitResult lm_fit(const ModelSpec& model, const ParamVector& start,
                 const TimeSeries& data, const FitOptions& opts) {
    data.validate();
    if (start.size() != model.size()) {
        throw DomainError("lm_fit: start point has wrong dimension");
    }

    Objective obj(model, data);
    const std::size_t m = obj.ts.size();

    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!model.params()[i].fixed) free_idx.push_back(i);
    }
    const std::size_t nf = free_idx.size();

    std::vector<double> theta(start.values().begin(), start.values().end());
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (model.params()[i].fixed) theta[i] = model.params()[i].fixed_value;
    }

    std::vector<double> pred = obj.predict(theta);  // start failures propagate
    double sse_cur = obj.sse_of(pred);
    if (!std::isfinite(sse_cur)) {
        throw FitError("lm_fit: objective is not finite at the start point");
    }

    double lambda = opts.lambda_init;
    int iterations = 0;
    bool converged = false;
    StopReason stop = StopReason::max_iterations;

    std::vector<double> jac(m * nf);  // column-major: jac[j*m + i]
    std::vector<double> trial(theta.size());
    std::vector<double> delta(nf);

    while (nf > 0 && iterations < opts.max_iterations) {
        // forward-difference Jacobian of the model curve
        bool jac_ok = true;
        for (std::size_t j = 0; j < nf; ++j) {
            const std::size_t idx = free_idx[j];
            const auto bd = start.bounds()[idx];
            double h = opts.fd_step * std::fmax(1.0, std::fabs(theta[idx]));
            if (theta[idx] + h > bd.upper) h = -h;
            if (theta[idx] + h < bd.lower) h = 0.5 * (bd.upper - bd.lower);
            std::vector<double> probe = theta;
            probe[idx] = theta[idx] + h;
            std::vector<double> pred_j;
            try {
                pred_j = obj.predict(probe);
            } catch (const Error&) {
                // retry from the other side before giving up on the column
                probe[idx] = theta[idx] - h;
                if (probe[idx] >= bd.lower && probe[idx] <= bd.upper) {
                    try {
                        pred_j = obj.predict(probe);
                        h = -h;
                    } catch (const Error&) {
                        jac_ok = false;
                    }
                } else {
                    jac_ok = false;
                }
            }
            if (!jac_ok) {
                std::fill_n(jac.begin() + long(j) * long(m), m, 0.0);
                jac_ok = true;
                continue;
            }
            const double inv_h = 1.0 / h;
            for (std::size_t i = 0; i < m; ++i) {
                jac[j * m + i] = (pred_j[i] - pred[i]) * inv_h;
            }
        }

        // normal equations: A = J^T J, g = J^T (pred - y)
        std::vector<double> A(nf * nf, 0.0), g(nf, 0.0);
        for (std::size_t j = 0; j < nf; ++j) {
            for (std::size_t k = j; k < nf; ++k) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += jac[j * m + i] * jac[k * m + i];
                A[j * nf + k] = acc;
                A[k * nf + j] = acc;
            }
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) acc += jac[j * m + i] * (pred[i] - obj.ys[i]);
            g[j] = acc;
        }

        // projected gradient of the SSE (2 J^T r with active bounds zeroed)
        double pg_max = 0.0;
        for (std::size_t j = 0; j < nf; ++j) {
            const std::size_t idx = free_idx[j];
            const auto bd = start.bounds()[idx];
            double pg = 2.0 * g[j];
            if (theta[idx] <= bd.lower && pg > 0.0) pg = 0.0;
            if (theta[idx] >= bd.upper && pg < 0.0) pg = 0.0;
            pg_max = std::fmax(pg_max, std::fabs(pg));
        }
        if (pg_max < opts.gradient_tol) {
            converged = true;
            stop = StopReason::gradient;
            break;
        }

        ++iterations;
        double diag_max = 0.0;
        for (std::size_t j = 0; j < nf; ++j) diag_max = std::fmax(diag_max, A[j * nf + j]);
        const double diag_floor = std::fmax(1e-30 * diag_max, 1e-300);

        bool stepped = false;
        while (!stepped) {
            std::vector<double> damped = A;
            for (std::size_t j = 0; j < nf; ++j) {
                damped[j * nf + j] += lambda * std::fmax(A[j * nf + j], diag_floor);
            }
            std::vector<double> rhs(nf);
            for (std::size_t j = 0; j < nf; ++j) rhs[j] = -g[j];

            bool ok = solve_dense(std::move(damped), std::move(rhs), nf, delta);
            double sse_trial = std::numeric_limits<double>::infinity();
            std::vector<double> pred_trial;
            if (ok) {
                trial = theta;
                for (std::size_t j = 0; j < nf; ++j) {
                    const std::size_t idx = free_idx[j];
                    const auto bd = start.bounds()[idx];
                    trial[idx] = std::clamp(theta[idx] + delta[j], bd.lower, bd.upper);
                }
                try {
                    pred_trial = obj.predict(trial);
                    sse_trial = obj.sse_of(pred_trial);
                } catch (const Error&) {
                    sse_trial = std::numeric_limits<double>::infinity();
                }
            }

            if (std::isfinite(sse_trial) && sse_trial < sse_cur) {
                const double decrease = sse_cur - sse_trial;
                theta = trial;
                pred = std::move(pred_trial);
                const double prev = sse_cur;
                sse_cur = sse_trial;
                lambda = std::fmax(lambda / 3.0, kLambdaMin);
                stepped = true;
                if (decrease <= opts.sse_rel_tol * std::fmax(prev, 1e-300)) {
                    converged = true;
                    stop = StopReason::sse_decrease;
                }
            } else {
                lambda *= 2.5;
                if (lambda > kLambdaMax) {
                    // no decreasing direction at maximal damping: the point is
                    // a minimum at floating-point resolution
                    converged = true;
                    stop = StopReason::no_step;
                    stepped = true;
                }
            }
        }
        if (converged) break;
    }
    if (nf == 0) {
        converged = true;
        stop = StopReason::gradient;
    }

    FitResult result;
    result.best_params = ParamVector(theta, {start.bounds().begin(), start.bounds().end()});
    result.residuals.resize(m);
    for (std::size_t i = 0; i < m; ++i) result.residuals[i] = obj.ys[i] - pred[i];
    result.sse = sum_squares(result.residuals);
    result.iterations = iterations;
    result.converged = converged;
    result.stop_reason = stop;
    result.start_point = start;
    result.n_evaluations = obj.evals;
    return result;
}

// ---------------------------------------------------------------------------
// Multi-start
// ---------------------------------------------------------------------------

namespace {

// Deterministic helpers: identical sequences on every platform.
double next_unit(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t j = std::size_t(rng() % (i + 1));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

}  // namespace

FitResult multistart_fit(const ModelSpec& model, const TimeSeries& data,
                         int n_starts, std::uint64_t seed, const FitOptions& opts) {
    if (n_starts < 1) throw DomainError("multistart_fit: n_starts must be >= 1");
    data.validate();

    std::vector<ParamVector> starts;
    starts.reserve(std::size_t(n_starts));
    starts.push_back(ParamVector::default_start(model));

    if (n_starts > 1) {
        // Latin hypercube over the free box, one stratum per start and
        // parameter; positive scale parameters are sampled log-uniformly.
        std::mt19937_64 rng(seed);
        const std::size_t n = std::size_t(n_starts);
        std::vector<std::vector<double>> unit(model.size());
        for (std::size_t j = 0; j < model.size(); ++j) {
            if (model.params()[j].fixed) continue;
            const auto perm = shuffled_indices(n, rng);
            unit[j].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                unit[j][i] = (double(perm[i]) + next_unit(rng)) / double(n);
            }
        }
        const ParamVector& base = starts.front();
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<double> vals(model.size());
            for (std::size_t j = 0; j < model.size(); ++j) {
                const auto& p = model.params()[j];
                if (p.fixed) {
                    vals[j] = p.fixed_value;
                } else if (p.log_scale) {
                    const double lo = std::log10(p.lower), hi = std::log10(p.upper);
                    vals[j] = std::pow(10.0, lo + unit[j][i] * (hi - lo));
                } else {
                    vals[j] = p.lower + unit[j][i] * (p.upper - p.lower);
                }
                vals[j] = std::clamp(vals[j], p.lower, p.upper);
            }
            starts.emplace_back(std::move(vals),
                                std::vector<Bounds>(base.bounds().begin(), base.bounds().end()));
        }
    }

    struct Slot {
        bool ok = false;
        FitResult result;
        std::string error;
    };
    std::vector<Slot> slots(starts.size());

    const auto run_one = [&](std::size_t i) {
        try {
            slots[i].result = lm_fit(model, starts[i], data, opts);
            slots[i].result.start_index = int(i);
            slots[i].ok = true;
        } catch (const std::exception& e) {
            slots[i].error = e.what();
        }
    };

    int threads = opts.threads > 0 ? opts.threads : int(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, int(starts.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < starts.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(threads));
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < starts.size();
                     i = next.fetch_add(1)) {
                    run_one(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    const Slot* best = nullptr;
    for (const auto& s : slots) {
        if (!s.ok) continue;
        if (!best || s.result.sse < best->result.sse) best = &s;
    }
    if (!best) {
        std::string first;
        for (const auto& s : slots) {
            if (!s.error.empty()) {
                first = s.error;
                break;
            }
        }
        throw FitError("multistart_fit: every start failed (first error: " + first + ")");
    }
    return best->result;
}

double efficiency_gain(double e_classical, double e_fractional) {
    if (!(e_classical > 0.0)) {
        throw DomainError("efficiency_gain: classical error must be positive");
    }
    if (!(e_fractional >= 0.0)) {
        throw DomainError("efficiency_gain: fractional error must be non-negative");
    }
    return std::fabs((e_classical - e_fractional) / e_classical);
}

}  // namespace fracfit::fitting
