#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

// Numerical fractional operators on uniform grids. These are verification
// oracles: low-order schemes with exactly integrated kernel moments, used to
// check that closed-form model solutions satisfy their fractional equations.

namespace fracfit::fracops {

/// A function sampled on the uniform grid t_k = a + k*step, k = 0..n-1.
class GridFunction {
public:
    /// Requires step > 0 and at least 3 samples, all finite.
    GridFunction(double a, double step, std::vector<double> values);

    /// Samples f on [a, t_max] with the given step (t_max is honored to
    /// within rounding of (t_max - a)/step to an integer point count).
    static GridFunction sample(double a, double t_max, double step,
                               const std::function<double(double)>& f);

    double a() const { return a_; }
    double step() const { return step_; }
    double t_max() const { return a_ + step_ * double(values_.size() - 1); }
    std::size_t size() const { return values_.size(); }
    double t(std::size_t k) const { return a_ + step_ * double(k); }
    std::span<const double> values() const { return values_; }
    double value(std::size_t k) const { return values_[k]; }

    /// Grid index of t; throws DomainError when t is off-grid.
    std::size_t index_of(double t) const;

private:
    double a_;
    double step_;
    std::vector<double> values_;
};

/// Riemann fractional integral of order alpha > 0,
///
///   I^alpha y(t) = 1/Gamma(alpha) * int_a^t (t-s)^(alpha-1) y(s) ds,
///
/// approximated by integrating the weakly singular kernel exactly against
/// the piecewise-linear interpolant of y (product trapezoidal rule,
/// O(step^2) for smooth y). t must lie on the grid with t > a.
double frac_integral(const GridFunction& y, double alpha, double t);

/// Caputo fractional derivative of order alpha in (0,1),
///
///   D^alpha y(t) = 1/Gamma(1-alpha) * int_a^t (t-s)^(-alpha) y'(s) ds,
///
/// approximated by the L1 scheme: piecewise-constant y' from first
/// differences, kernel integrated exactly (O(step^(2-alpha)) for smooth y).
/// t must lie on the grid with t > a.
double caputo_derivative(const GridFunction& y, double alpha, double t);

/// Max-norm residual of the Volterra form of the initial-value problem
/// D^alpha y = f(t, y), y(a) = y_a, over all grid points:
///
///   max_k | y(t_k) - y_a - I^alpha[ f(., y(.)) ](t_k) |.
///
/// A closed-form solution drives this to the quadrature error O(step^2).
/// Requires alpha in (0, 1] and y(a) == y_a (to grid tolerance).
double volterra_residual(const GridFunction& y,
                         const std::function<double(double, double)>& rhs,
                         double alpha, double y_a);

}  // namespace fracfit::fracops
