// AVX2 + FMA variants of the series kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; it mirrors the scalar path operation
// for operation (see kernel_math.hpp). Tail elements fall through to the
// scalar routines.

#include "fracfit/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cassert>
#include <cmath>
#include <limits>

#include "kernel_math.hpp"

namespace fracfit::kernels::avx2 {

namespace d = fracfit::kernels::detail;

namespace {

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

inline __m256d v_abs(__m256d v) {
    return _mm256_andnot_pd(set1(-0.0), v);
}

// 2^n for integral-valued n in [-1022, 1023]
inline __m256d v_pow2i(__m256d n) {
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i w = _mm256_cvtepi32_epi64(n32);
    w = _mm256_add_epi64(w, _mm256_set1_epi64x(1023));
    w = _mm256_slli_epi64(w, 52);
    return _mm256_castsi256_pd(w);
}

inline __m256d v_exp(__m256d x) {
    x = _mm256_min_pd(_mm256_max_pd(x, set1(d::kExpMin)), set1(d::kExpMax));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, set1(d::kInvLn2)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, set1(d::kExpC1), x);
    r = _mm256_fnmadd_pd(n, set1(d::kExpC2), r);
    const __m256d r2 = _mm256_mul_pd(r, r);
    __m256d p = _mm256_fmadd_pd(set1(d::kExpP0), r2, set1(d::kExpP1));
    p = _mm256_fmadd_pd(p, r2, set1(d::kExpP2));
    p = _mm256_mul_pd(r, p);
    __m256d q = _mm256_fmadd_pd(set1(d::kExpQ0), r2, set1(d::kExpQ1));
    q = _mm256_fmadd_pd(q, r2, set1(d::kExpQ2));
    q = _mm256_fmadd_pd(q, r2, set1(d::kExpQ3));
    const __m256d e = _mm256_add_pd(
        set1(1.0), _mm256_mul_pd(set1(2.0), _mm256_div_pd(p, _mm256_sub_pd(q, p))));
    return _mm256_mul_pd(e, v_pow2i(n));
}

inline __m256d v_log(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i expo = _mm256_srli_epi64(bits, 52);
    // int64 -> double via the 2^52 bias trick (exponents are tiny)
    __m256d ee = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(expo, _mm256_set1_epi64x(0x4330000000000000LL))),
        set1(4503599627370496.0 + 1023.0));
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
        _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
        _mm256_set1_epi64x(0x3ff0000000000000LL)));
    const __m256d big = _mm256_cmp_pd(m, set1(d::kSqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
    ee = _mm256_add_pd(ee, _mm256_and_pd(big, set1(1.0)));
    const __m256d s =
        _mm256_div_pd(_mm256_sub_pd(m, set1(1.0)), _mm256_add_pd(m, set1(1.0)));
    const __m256d s2 = _mm256_mul_pd(s, s);
    __m256d t = set1(d::kAtanh[0]);
    for (int i = 1; i < 10; ++i) t = _mm256_fmadd_pd(t, s2, set1(d::kAtanh[i]));
    const __m256d twos = _mm256_mul_pd(set1(2.0), s);
    const __m256d lnm = _mm256_fmadd_pd(_mm256_mul_pd(twos, s2), t, twos);
    return _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(ee, set1(d::kLn2Hi)), lnm),
        _mm256_mul_pd(ee, set1(d::kLn2Lo)));
}

inline __m256d v_lgamma(__m256d x) {
    __m256d w = x;
    __m256d p = set1(1.0);
    for (int i = 0; i < 16; ++i) {
        const __m256d small = _mm256_cmp_pd(w, set1(d::kLgammaShift), _CMP_LT_OQ);
        if (_mm256_movemask_pd(small) == 0) break;
        p = _mm256_blendv_pd(p, _mm256_mul_pd(p, w), small);
        w = _mm256_blendv_pd(w, _mm256_add_pd(w, set1(1.0)), small);
    }
    const __m256d z = _mm256_div_pd(set1(1.0), _mm256_mul_pd(w, w));
    __m256d s = set1(d::kStirling[0]);
    for (int i = 1; i < 8; ++i) s = _mm256_fmadd_pd(s, z, set1(d::kStirling[i]));
    s = _mm256_div_pd(s, w);
    __m256d lg = _mm256_add_pd(
        _mm256_fmadd_pd(_mm256_sub_pd(w, set1(0.5)), v_log(w),
                        _mm256_sub_pd(set1(d::kHalfLnTwoPi), w)),
        s);
    lg = _mm256_sub_pd(lg, v_log(p));
    // x <= 0 is a caller error; return NaN on those lanes
    const __m256d bad = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LE_OQ);
    return _mm256_blendv_pd(lg, set1(std::numeric_limits<double>::quiet_NaN()), bad);
}

}  // namespace

bool compiled() { return true; }

void lgamma_batch(std::span<const double> x, std::span<double> out) {
    assert(x.size() == out.size());
    const std::size_t n = x.size();
    const std::size_t nv = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nv; i += 4) {
        _mm256_storeu_pd(out.data() + i, v_lgamma(_mm256_loadu_pd(x.data() + i)));
    }
    for (std::size_t i = nv; i < n; ++i) out[i] = scalar::lgamma_core(x[i]);
}

double exp_affine_sum(std::span<const double> a, std::span<const double> b,
                      std::span<const double> sign, double x,
                      double* max_exponent) {
    assert(a.size() == b.size() && a.size() == sign.size());
    const std::size_t n = a.size();
    const std::size_t nv = n & ~std::size_t(3);
    const __m256d vx = set1(x);
    __m256d vsum = _mm256_setzero_pd();
    __m256d vcomp = _mm256_setzero_pd();
    __m256d vmax = set1(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < nv; i += 4) {
        const __m256d e =
            _mm256_fmadd_pd(_mm256_loadu_pd(b.data() + i), vx, _mm256_loadu_pd(a.data() + i));
        vmax = _mm256_max_pd(vmax, e);
        const __m256d term = _mm256_mul_pd(_mm256_loadu_pd(sign.data() + i), v_exp(e));
        // Neumaier per lane
        const __m256d s = _mm256_add_pd(vsum, term);
        const __m256d ge = _mm256_cmp_pd(v_abs(vsum), v_abs(term), _CMP_GE_OQ);
        const __m256d big = _mm256_blendv_pd(term, vsum, ge);
        const __m256d small = _mm256_blendv_pd(vsum, term, ge);
        vcomp = _mm256_add_pd(vcomp, _mm256_add_pd(_mm256_sub_pd(big, s), small));
        vsum = s;
    }
    alignas(32) double ls[4], lc[4], lm[4];
    _mm256_store_pd(ls, vsum);
    _mm256_store_pd(lc, vcomp);
    _mm256_store_pd(lm, vmax);

    double sum = 0.0, comp = 0.0;
    for (int l = 0; l < 4; ++l) {
        const double t = ls[l];
        const double s = sum + t;
        const double bg = std::fabs(sum) >= std::fabs(t) ? sum : t;
        const double sm = std::fabs(sum) >= std::fabs(t) ? t : sum;
        comp += (bg - s) + sm;
        sum = s;
        comp += lc[l];
    }
    double max_e = std::fmax(std::fmax(lm[0], lm[1]), std::fmax(lm[2], lm[3]));
    for (std::size_t i = nv; i < n; ++i) {
        const double e = std::fma(b[i], x, a[i]);
        max_e = std::fmax(max_e, e);
        const double t = sign[i] * scalar::exp_core(e);
        const double s = sum + t;
        const double bg = std::fabs(sum) >= std::fabs(t) ? sum : t;
        const double sm = std::fabs(sum) >= std::fabs(t) ? t : sum;
        comp += (bg - s) + sm;
        sum = s;
    }
    if (max_exponent) *max_exponent = max_e;
    return sum + comp;
}

}  // namespace fracfit::kernels::avx2

#else  // no AVX2 at build time

#include <stdexcept>

namespace fracfit::kernels::avx2 {

bool compiled() { return false; }

void lgamma_batch(std::span<const double>, std::span<double>) {
    throw std::logic_error("fracfit: AVX2 kernels not compiled in");
}

double exp_affine_sum(std::span<const double>, std::span<const double>,
                      std::span<const double>, double, double*) {
    throw std::logic_error("fracfit: AVX2 kernels not compiled in");
}

}  // namespace fracfit::kernels::avx2

#endif
