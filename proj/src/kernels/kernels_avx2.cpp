// AVX2/FMA variants of the batch map kernels. Compiled only when the
// toolchain accepts -mavx2 -mfma; selected at runtime behind a cpuid check.
//
// sin(2*pi*x) is evaluated with exact mod-1 argument reduction followed by
// quarter-period reduction and Taylor polynomials on [-pi/4, pi/4]
// (truncation below 5e-17 for sin, 2e-18 for cos), so the vector path stays
// within a few ulp of the scalar reference.

#include "saddlescope/kernels.hpp"

#if defined(SADDLESCOPE_HAVE_AVX2)

#include <immintrin.h>

namespace saddlescope {
namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;

// 1/(2k+1)! with alternating signs, for sin(phi) = phi*(1 + phi^2*P(phi^2))
constexpr double S1 = -1.0 / 6.0;
constexpr double S2 = 1.0 / 120.0;
constexpr double S3 = -1.0 / 5040.0;
constexpr double S4 = 1.0 / 362880.0;
constexpr double S5 = -1.0 / 39916800.0;
constexpr double S6 = 1.0 / 6227020800.0;
constexpr double S7 = -1.0 / 1307674368000.0;

// 1/(2k)! with alternating signs, for cos(phi) = 1 + phi^2*Q(phi^2)
constexpr double C1 = -0.5;
constexpr double C2 = 1.0 / 24.0;
constexpr double C3 = -1.0 / 720.0;
constexpr double C4 = 1.0 / 40320.0;
constexpr double C5 = -1.0 / 3628800.0;
constexpr double C6 = 1.0 / 479001600.0;
constexpr double C7 = -1.0 / 87178291200.0;
constexpr double C8 = 1.0 / 20922789888000.0;

inline __m256d sin2pi_pd(__m256d x) {
    const __m256d four = _mm256_set1_pd(4.0);
    // u = x - round(x) in [-0.5, 0.5]; exact for |x| < 2^52
    __m256d u = _mm256_sub_pd(x, _mm256_round_pd(x, _MM_FROUND_TO_NEAREST_INT));
    __m256d t = _mm256_mul_pd(u, four);  // quarter turns, in [-2, 2]
    __m256d kd = _mm256_round_pd(t, _MM_FROUND_TO_NEAREST_INT);
    __m256d s = _mm256_sub_pd(t, kd);  // fractional quarter turn in [-0.5, 0.5]
    __m256d phi = _mm256_mul_pd(s, _mm256_set1_pd(kHalfPi));
    __m256d p2 = _mm256_mul_pd(phi, phi);

    __m256d ps = _mm256_set1_pd(S7);
    ps = _mm256_fmadd_pd(ps, p2, _mm256_set1_pd(S6));
    ps = _mm256_fmadd_pd(ps, p2, _mm256_set1_pd(S5));
    ps = _mm256_fmadd_pd(ps, p2, _mm256_set1_pd(S4));
    ps = _mm256_fmadd_pd(ps, p2, _mm256_set1_pd(S3));
    ps = _mm256_fmadd_pd(ps, p2, _mm256_set1_pd(S2));
    ps = _mm256_fmadd_pd(ps, p2, _mm256_set1_pd(S1));
    __m256d sinp = _mm256_fmadd_pd(_mm256_mul_pd(ps, p2), phi, phi);

    __m256d pc = _mm256_set1_pd(C8);
    pc = _mm256_fmadd_pd(pc, p2, _mm256_set1_pd(C7));
    pc = _mm256_fmadd_pd(pc, p2, _mm256_set1_pd(C6));
    pc = _mm256_fmadd_pd(pc, p2, _mm256_set1_pd(C5));
    pc = _mm256_fmadd_pd(pc, p2, _mm256_set1_pd(C4));
    pc = _mm256_fmadd_pd(pc, p2, _mm256_set1_pd(C3));
    pc = _mm256_fmadd_pd(pc, p2, _mm256_set1_pd(C2));
    pc = _mm256_fmadd_pd(pc, p2, _mm256_set1_pd(C1));
    __m256d cosp = _mm256_fmadd_pd(pc, p2, _mm256_set1_pd(1.0));

    // quadrant selection: k+4 in {2..6}; bit0 -> cos branch, bit1 -> sign flip
    __m128i ki = _mm256_cvtpd_epi32(_mm256_add_pd(kd, four));
    __m256i k64 = _mm256_cvtepi32_epi64(ki);
    __m256i bit0 = _mm256_and_si256(k64, _mm256_set1_epi64x(1));
    __m256i bit1 = _mm256_and_si256(_mm256_srli_epi64(k64, 1), _mm256_set1_epi64x(1));
    __m256d use_cos = _mm256_castsi256_pd(
        _mm256_cmpeq_epi64(bit0, _mm256_set1_epi64x(1)));
    __m256d flip = _mm256_castsi256_pd(
        _mm256_cmpeq_epi64(bit1, _mm256_set1_epi64x(1)));

    __m256d val = _mm256_blendv_pd(sinp, cosp, use_cos);
    __m256d sign = _mm256_and_pd(flip, _mm256_set1_pd(-0.0));
    return _mm256_xor_pd(val, sign);
}

// scalar tail with the same polynomial and fused ops as the vector lanes
inline double sin2pi_tail(double x) {
    double u = x - std::nearbyint(x);
    double t = 4.0 * u;
    double kd = std::nearbyint(t);
    double s = t - kd;
    double phi = s * kHalfPi;
    double p2 = phi * phi;
    double ps = S7;
    ps = std::fma(ps, p2, S6);
    ps = std::fma(ps, p2, S5);
    ps = std::fma(ps, p2, S4);
    ps = std::fma(ps, p2, S3);
    ps = std::fma(ps, p2, S2);
    ps = std::fma(ps, p2, S1);
    double sinp = std::fma(ps * p2, phi, phi);
    double pc = C8;
    pc = std::fma(pc, p2, C7);
    pc = std::fma(pc, p2, C6);
    pc = std::fma(pc, p2, C5);
    pc = std::fma(pc, p2, C4);
    pc = std::fma(pc, p2, C3);
    pc = std::fma(pc, p2, C2);
    pc = std::fma(pc, p2, C1);
    double cosp = std::fma(pc, p2, 1.0);
    int k = static_cast<int>(kd) + 4;
    double val = (k & 1) ? cosp : sinp;
    return ((k >> 1) & 1) ? -val : val;
}

void sin_two_pi_avx2(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, sin2pi_pd(_mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) out[i] = sin2pi_tail(x[i]);
}

void standard_forward_avx2(double k, double* x, double* y, std::size_t n) {
    const __m256d kv = _mm256_set1_pd(k);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_loadu_pd(x + i);
        __m256d yv = _mm256_loadu_pd(y + i);
        __m256d yn = _mm256_fmadd_pd(kv, sin2pi_pd(xv), yv);
        _mm256_storeu_pd(y + i, yn);
        _mm256_storeu_pd(x + i, _mm256_add_pd(xv, yn));
    }
    for (; i < n; ++i) {
        double yn = std::fma(k, sin2pi_tail(x[i]), y[i]);
        y[i] = yn;
        x[i] = x[i] + yn;
    }
}

void standard_inverse_avx2(double k, double* x, double* y, std::size_t n) {
    const __m256d kv = _mm256_set1_pd(k);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_loadu_pd(x + i);
        __m256d yv = _mm256_loadu_pd(y + i);
        __m256d xp = _mm256_sub_pd(xv, yv);
        _mm256_storeu_pd(x + i, xp);
        __m256d yp = _mm256_fnmadd_pd(kv, sin2pi_pd(xp), yv);
        _mm256_storeu_pd(y + i, yp);
    }
    for (; i < n; ++i) {
        double xp = x[i] - y[i];
        x[i] = xp;
        y[i] = std::fma(-k, sin2pi_tail(xp), y[i]);
    }
}

}  // namespace

const MapKernels& avx2_kernels() {
    static const MapKernels table{"avx2", sin_two_pi_avx2, standard_forward_avx2,
                                  standard_inverse_avx2};
    return table;
}

}  // namespace saddlescope

#endif  // SADDLESCOPE_HAVE_AVX2
