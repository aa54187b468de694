#pragma once

#include <cstddef>
#include <span>

// Inner-loop kernels for series evaluation. Every kernel exists in a plain
// scalar form and, on x86-64, an AVX2+FMA form built from the same constants
// and operation order. The dispatched entry points select a variant once per
// process; tests call the per-variant namespaces directly to check agreement.

namespace fracfit::kernels {

enum class Variant { scalar, avx2 };

const char* variant_name(Variant v);

/// True when the variant is both compiled in and supported by this CPU.
bool variant_supported(Variant v);

/// Currently dispatched variant. Resolution order: an explicit set_variant()
/// call, the FRACFIT_KERNEL environment variable ("scalar" or "avx2"), then
/// the best supported variant.
Variant active_variant();

/// Force a variant (throws DomainError if unsupported). Intended for tests
/// and benchmarking.
void set_variant(Variant v);

/// out[i] = ln Gamma(x[i]). Requires x[i] > 0 (quiet NaN otherwise) and
/// out.size() == x.size().
void lgamma_batch(std::span<const double> x, std::span<double> out);

/// Compensated sum of sign[i] * exp(a[i] + b[i] * x) over all i.
/// Exponents are clamped to the representable range before exponentiation;
/// when max_exponent is non-null it receives the unclamped maximum of
/// a[i] + b[i]*x so the caller can detect overflow. All three spans must
/// have equal length; sign[i] is +1.0 or -1.0.
double exp_affine_sum(std::span<const double> a, std::span<const double> b,
                      std::span<const double> sign, double x,
                      double* max_exponent = nullptr);

namespace scalar {

// Scalar reference path. Also usable directly as ordinary math functions.
double exp_core(double x);
double log_core(double x);
double lgamma_core(double x);

void lgamma_batch(std::span<const double> x, std::span<double> out);
double exp_affine_sum(std::span<const double> a, std::span<const double> b,
                      std::span<const double> sign, double x,
                      double* max_exponent);

}  // namespace scalar

namespace avx2 {

/// False when this binary was built without AVX2 support.
bool compiled();

void lgamma_batch(std::span<const double> x, std::span<double> out);
double exp_affine_sum(std::span<const double> a, std::span<const double> b,
                      std::span<const double> sign, double x,
                      double* max_exponent);

}  // namespace avx2

}  // namespace fracfit::kernels
