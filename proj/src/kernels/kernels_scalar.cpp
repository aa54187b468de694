#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>

#include "fracfit/kernels.hpp"
#include "kernel_math.hpp"

namespace fracfit::kernels::scalar {

namespace d = fracfit::kernels::detail;

namespace {

inline double pow2i(int n) {
    // n in [-1022, 1023]
    return std::bit_cast<double>(std::uint64_t(1023 + n) << 52);
}

inline void neumaier_add(double& sum, double& comp, double term) {
    const double s = sum + term;
    const double big = std::fabs(sum) >= std::fabs(term) ? sum : term;
    const double small = std::fabs(sum) >= std::fabs(term) ? term : sum;
    comp += (big - s) + small;
    sum = s;
}

}  // namespace

double exp_core(double x) {
    x = std::fmin(std::fmax(x, d::kExpMin), d::kExpMax);
    const double n = std::nearbyint(x * d::kInvLn2);
    double r = std::fma(-n, d::kExpC1, x);
    r = std::fma(-n, d::kExpC2, r);
    const double r2 = r * r;
    const double p = r * std::fma(std::fma(d::kExpP0, r2, d::kExpP1), r2, d::kExpP2);
    const double q = std::fma(
        std::fma(std::fma(d::kExpQ0, r2, d::kExpQ1), r2, d::kExpQ2), r2, d::kExpQ3);
    const double e = 1.0 + 2.0 * (p / (q - p));
    return e * pow2i(int(n));
}

double log_core(double x) {
    // requires x > 0, finite, normal
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    double ee = double(int((bits >> 52) & 0x7ff) - 1023);
    double m = std::bit_cast<double>((bits & 0x000fffffffffffffULL) |
                                     0x3ff0000000000000ULL);
    if (m > d::kSqrt2) {
        m *= 0.5;
        ee += 1.0;
    }
    const double s = (m - 1.0) / (m + 1.0);
    const double s2 = s * s;
    double t = d::kAtanh[0];
    for (int i = 1; i < 10; ++i) t = std::fma(t, s2, d::kAtanh[i]);
    const double twos = 2.0 * s;
    const double lnm = std::fma(twos * s2, t, twos);
    return (ee * d::kLn2Hi + lnm) + ee * d::kLn2Lo;
}

double lgamma_core(double x) {
    if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    double w = x;
    double p = 1.0;
    for (int i = 0; i < 16 && w < d::kLgammaShift; ++i) {
        p *= w;
        w += 1.0;
    }
    const double z = 1.0 / (w * w);
    double s = d::kStirling[0];
    for (int i = 1; i < 8; ++i) s = std::fma(s, z, d::kStirling[i]);
    s /= w;
    double lg = std::fma(w - 0.5, log_core(w), d::kHalfLnTwoPi - w) + s;
    lg -= log_core(p);
    return lg;
}

void lgamma_batch(std::span<const double> x, std::span<double> out) {
    assert(x.size() == out.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = lgamma_core(x[i]);
}

double exp_affine_sum(std::span<const double> a, std::span<const double> b,
                      std::span<const double> sign, double x,
                      double* max_exponent) {
    assert(a.size() == b.size() && a.size() == sign.size());
    double sum = 0.0, comp = 0.0;
    double max_e = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = std::fma(b[i], x, a[i]);
        max_e = std::fmax(max_e, e);
        const double term = sign[i] * exp_core(e);
        neumaier_add(sum, comp, term);
    }
    if (max_exponent) *max_exponent = max_e;
    return sum + comp;
}

}  // namespace fracfit::kernels::scalar
