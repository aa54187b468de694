#include <atomic>
#include <cstdlib>
#include <cstring>

#include "fracfit/errors.hpp"
#include "fracfit/kernels.hpp"

namespace fracfit::kernels {

namespace {

bool cpu_has_avx2_fma() {
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Variant detect() {
    if (const char* env = std::getenv("FRACFIT_KERNEL")) {
        if (std::strcmp(env, "scalar") == 0) return Variant::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2::compiled() && cpu_has_avx2_fma())
            return Variant::avx2;
        // Unknown or unsupported request: fall through to auto-detection.
    }
    if (avx2::compiled() && cpu_has_avx2_fma()) return Variant::avx2;
    return Variant::scalar;
}

std::atomic<int> g_variant{-1};

}  // namespace

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::scalar: return "scalar";
        case Variant::avx2: return "avx2";
    }
    return "unknown";
}

bool variant_supported(Variant v) {
    if (v == Variant::scalar) return true;
    return avx2::compiled() && cpu_has_avx2_fma();
}

Variant active_variant() {
    int v = g_variant.load(std::memory_order_acquire);
    if (v < 0) {
        const Variant detected = detect();
        int expected = -1;
        if (g_variant.compare_exchange_strong(expected, int(detected),
                                              std::memory_order_acq_rel)) {
            return detected;
        }
        v = g_variant.load(std::memory_order_acquire);
    }
    return Variant(v);
}

void set_variant(Variant v) {
    if (!variant_supported(v)) {
        throw DomainError(std::string("kernel variant not supported on this host: ") +
                          variant_name(v));
    }
    g_variant.store(int(v), std::memory_order_release);
}

void lgamma_batch(std::span<const double> x, std::span<double> out) {
    if (active_variant() == Variant::avx2) {
        avx2::lgamma_batch(x, out);
    } else {
        scalar::lgamma_batch(x, out);
    }
}

double exp_affine_sum(std::span<const double> a, std::span<const double> b,
                      std::span<const double> sign, double x,
                      double* max_exponent) {
    if (active_variant() == Variant::avx2) {
        return avx2::exp_affine_sum(a, b, sign, x, max_exponent);
    }
    return scalar::exp_affine_sum(a, b, sign, x, max_exponent);
}

}  // namespace fracfit::kernels
