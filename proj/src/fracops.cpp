#include "fracfit/fracops.hpp"

#include <cmath>
#include <string>

#include "fracfit/errors.hpp"
#include "fracfit/specfun.hpp"

namespace fracfit::fracops {

GridFunction::GridFunction(double a, double step, std::vector<double> values)
    : a_(a), step_(step), values_(std::move(values)) {
    if (!(step_ > 0.0)) throw DomainError("GridFunction: step must be positive");
    if (values_.size() < 3) throw DomainError("GridFunction: need at least 3 samples");
    if (!std::isfinite(a_)) throw DomainError("GridFunction: left endpoint not finite");
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("GridFunction: non-finite sample");
    }
}

GridFunction GridFunction::sample(double a, double t_max, double step,
                                  const std::function<double(double)>& f) {
    if (!(t_max > a)) throw DomainError("GridFunction::sample: t_max must exceed a");
    if (!(step > 0.0)) throw DomainError("GridFunction::sample: step must be positive");
    const auto n = std::size_t(std::llround((t_max - a) / step)) + 1;
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k) vals[k] = f(a + step * double(k));
    return GridFunction(a, step, std::move(vals));
}

std::size_t GridFunction::index_of(double t) const {
    const double x = (t - a_) / step_;
    const double k = std::nearbyint(x);
    if (k < 0 || k >= double(values_.size()) ||
        std::fabs(x - k) > 1e-6 * (1.0 + std::fabs(x))) {
        throw DomainError("grid function: t = " + std::to_string(t) +
                          " does not lie on the grid");
    }
    return std::size_t(k);
}

namespace {

// Shared weight machinery: powers of the node distances d*h, computed once.
std::vector<double> distance_powers(double step, std::size_t n, double expo) {
    std::vector<double> p(n);
    p[0] = 0.0;
    for (std::size_t d = 1; d < n; ++d) p[d] = std::pow(step * double(d), expo);
    return p;
}

// Product-trapezoidal fractional integral at node j (> 0), with the powers
// pw[d] = (d h)^alpha and pw1[d] = (d h)^(alpha+1) precomputed.
double frac_integral_at(const GridFunction& y, double alpha, std::size_t j,
                        const std::vector<double>& pw,
                        const std::vector<double>& pw1, double inv_gamma) {
    const double h = y.step();
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
        // subinterval [t_i, t_{i+1}]; u = t_j - s runs over [u1, u2]
        const std::size_t d2 = j - i, d1 = j - i - 1;
        const double u2 = double(d2) * h;
        const double slope = (y.value(i + 1) - y.value(i)) / h;
        // integral of u^(alpha-1) (y_i + slope (u2 - u)) du over [u1, u2]
        const double term = (y.value(i) + slope * u2) * (pw[d2] - pw[d1]) / alpha -
                            slope * (pw1[d2] - pw1[d1]) / (alpha + 1.0);
        const double s = acc + term;
        comp += std::fabs(acc) >= std::fabs(term) ? (acc - s) + term : (term - s) + acc;
        acc = s;
    }
    return inv_gamma * (acc + comp);
}

}  // namespace

double frac_integral(const GridFunction& y, double alpha, double t) {
    if (!(alpha > 0.0)) throw DomainError("frac_integral: alpha must be positive");
    const std::size_t j = y.index_of(t);
    if (j == 0) throw DomainError("frac_integral: t must exceed the left endpoint");
    const auto pw = distance_powers(y.step(), j + 1, alpha);
    const auto pw1 = distance_powers(y.step(), j + 1, alpha + 1.0);
    return frac_integral_at(y, alpha, j, pw, pw1, 1.0 / specfun::gamma(alpha));
}

double caputo_derivative(const GridFunction& y, double alpha, double t) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("caputo_derivative: alpha must lie strictly inside (0,1)");
    }
    const std::size_t j = y.index_of(t);
    if (j == 0) throw DomainError("caputo_derivative: t must exceed the left endpoint");
    const double h = y.step();
    // L1 scheme: y' piecewise constant, kernel (t-s)^(-alpha) integrated exactly
    const auto pw = distance_powers(h, j + 1, 1.0 - alpha);
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
        const double dy = (y.value(i + 1) - y.value(i)) / h;
        const double term = dy * (pw[j - i] - pw[j - i - 1]);
        const double s = acc + term;
        comp += std::fabs(acc) >= std::fabs(term) ? (acc - s) + term : (term - s) + acc;
        acc = s;
    }
    return (acc + comp) / ((1.0 - alpha) * specfun::gamma(1.0 - alpha));
}

double volterra_residual(const GridFunction& y,
                         const std::function<double(double, double)>& rhs,
                         double alpha, double y_a) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("volterra_residual: alpha must lie in (0, 1]");
    }
    const double scale = std::fmax(1.0, std::fabs(y_a));
    if (std::fabs(y.value(0) - y_a) > 1e-9 * scale) {
        throw DomainError("volterra_residual: model curve does not start at y_a");
    }
    const std::size_t n = y.size();
    std::vector<double> f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = rhs(y.t(k), y.value(k));
    const GridFunction g(y.a(), y.step(), std::move(f));

    const auto pw = distance_powers(y.step(), n, alpha);
    const auto pw1 = distance_powers(y.step(), n, alpha + 1.0);
    const double inv_gamma = 1.0 / specfun::gamma(alpha);
    double worst = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double integral = frac_integral_at(g, alpha, k, pw, pw1, inv_gamma);
        worst = std::fmax(worst, std::fabs(y.value(k) - y_a - integral));
    }
    return worst;
}

}  // namespace fracfit::fracops
