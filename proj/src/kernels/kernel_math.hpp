#pragma once

// Constants shared by the scalar and AVX2 kernel paths. Both paths evaluate
// the same polynomials in the same operation order so their results agree to
// a few ulp; only summation order differs between variants.

namespace fracfit::kernels::detail {

// exp(x): x = n ln2 + r with |r| <= ln2/2, then the rational approximation
// exp(r) = 1 + 2 r P(r^2) / (Q(r^2) - r P(r^2)) and scaling by 2^n.
inline constexpr double kInvLn2 = 1.44269504088896340736;
inline constexpr double kExpC1 = 6.93145751953125e-1;  // ln2 high part, exact product with |n| < 2^31
inline constexpr double kExpC2 = 1.42860682030941723212e-6;
inline constexpr double kExpP0 = 1.26177193074810590878e-4;
inline constexpr double kExpP1 = 3.02994407707441961300e-2;
inline constexpr double kExpP2 = 9.99999999999999999910e-1;
inline constexpr double kExpQ0 = 3.00198505138664455042e-6;
inline constexpr double kExpQ1 = 2.52448340349684104192e-3;
inline constexpr double kExpQ2 = 2.27265548208155028766e-1;
inline constexpr double kExpQ3 = 2.00000000000000000005e0;
// Clamp window keeping 2^n construction in the normal range; inputs below
// kExpMin would round to zero anyway at the accumulation stage.
inline constexpr double kExpMax = 709.0;
inline constexpr double kExpMin = -708.0;

// ln(x): x = 2^e m with m in [sqrt(1/2), sqrt(2)), then
// ln(m) = 2 atanh(s), s = (m-1)/(m+1), via the odd series
// atanh(s) = s + s^3/3 + s^5/5 + ...  (|s| <= 0.1716, 10 series terms).
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kLn2Hi = 6.93147180369123816490e-1;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kAtanh[10] = {
    1.0 / 21.0, 1.0 / 19.0, 1.0 / 17.0, 1.0 / 15.0, 1.0 / 13.0,
    1.0 / 11.0, 1.0 / 9.0,  1.0 / 7.0,  1.0 / 5.0,  1.0 / 3.0,
};

// ln Gamma(w) for w >= 12: Stirling's series
// (w - 1/2) ln w - w + ln(2 pi)/2 + S(1/w^2)/w, with S in Horner order
// (highest power first). Smaller arguments are shifted up by the recurrence
// Gamma(x+1) = x Gamma(x).
inline constexpr double kHalfLnTwoPi = 9.18938533204672741781e-1;
inline constexpr double kLgammaShift = 12.0;
inline constexpr double kStirling[8] = {
    -3617.0 / 122400.0, 1.0 / 156.0, -691.0 / 360360.0, 1.0 / 1188.0,
    -1.0 / 1680.0,      1.0 / 1260.0, -1.0 / 360.0,     1.0 / 12.0,
};

}  // namespace fracfit::kernels::detail
