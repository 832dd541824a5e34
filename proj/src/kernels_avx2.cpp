#if defined(__x86_64__) || defined(_M_X64)

#include "slicelab/kernels.hpp"

#include <immintrin.h>

#include <cfloat>
#include <cmath>
#include <cstdint>

// AVX2 kernels, 4 doubles per lane group, vectorized across points.
// Reductions use separate mul/add (no FMA) so they match the scalar
// reference bit-for-bit; the exp/log cores use FMA internally and are
// tolerance-equivalent instead.

namespace slicelab::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d abs_pd(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
    return _mm256_and_pd(v, mask);
}

// ---------------------------------------------------------------------------
// exp core: argument reduction x = n*ln2 + r, |r| <= ln2/2, then a degree-14
// Taylor polynomial in Horner form. Max observed error a few ulp.
// Inputs are clamped to [-708, 709]; values below the clamp flush to
// exp(-708) ~ 3e-308 rather than to subnormals.
// ---------------------------------------------------------------------------
inline __m256d exp4(__m256d x) {
    const __m256d hi = _mm256_set1_pd(709.0);
    const __m256d lo = _mm256_set1_pd(-708.0);
    x = _mm256_min_pd(hi, _mm256_max_pd(lo, x));

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    // Cody-Waite two-part ln2
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
    __m256d r = _mm256_fnmadd_pd(n, c1, x);
    r = _mm256_fnmadd_pd(n, c2, r);

    // Horner with coefficients 1/k!
    __m256d p = _mm256_set1_pd(1.1470745597729724714e-11);   // 1/14!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6059043836821614599e-10));  // 1/13!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.0876756987868098979e-9));   // 1/12!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.5052108385441718775e-8));   // 1/11!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985890653e-7));   // 1/10!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985892510e-6));   // 1/9!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.4801587301587301566e-5));   // 1/8!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.9841269841269841253e-4));   // 1/7!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.3888888888888889419e-3));   // 1/6!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.3333333333333332177e-3));   // 1/5!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664354e-2));   // 1/4!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666665741e-1));   // 1/3!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(5.0e-1));                     // 1/2!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));                        // 1/1!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));                        // 1

    // scale by 2^n via exponent bits; n in [-1022, 1023] after the clamp
    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
    n64 = _mm256_slli_epi64(n64, 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(n64));
}

// ---------------------------------------------------------------------------
// log core: x = m * 2^e with m in (sqrt2/2, sqrt2], then
// log m = 2 atanh(t), t = (m-1)/(m+1), via the odd series through t^19.
// Requires x > 0; subnormal inputs are clamped to DBL_MIN.
// ---------------------------------------------------------------------------
inline __m256d log4(__m256d x) {
    x = _mm256_max_pd(x, _mm256_set1_pd(DBL_MIN));

    __m256i bits = _mm256_castpd_si256(x);
    __m256i ebits = _mm256_srli_epi64(bits, 52);
    // exponent as double via the 2^52 magic-number trick
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(ebits, magic)),
                              _mm256_set1_pd(4503599627370496.0 + 1023.0));

    __m256i mant = _mm256_or_si256(
        _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
        _mm256_set1_epi64x(0x3FF0000000000000LL));
    __m256d m = _mm256_castsi256_pd(mant);

    const __m256d sqrt2 = _mm256_set1_pd(1.41421356237309504880);
    __m256d gt = _mm256_cmp_pd(m, sqrt2, _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), gt);
    e = _mm256_add_pd(e, _mm256_and_pd(gt, _mm256_set1_pd(1.0)));

    const __m256d one = _mm256_set1_pd(1.0);
    __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    __m256d z = _mm256_mul_pd(t, t);

    __m256d p = _mm256_set1_pd(1.0 / 19.0);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 17.0));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 15.0));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 13.0));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 11.0));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 9.0));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 7.0));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 5.0));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 3.0));
    p = _mm256_fmadd_pd(p, z, one);
    __m256d logm = _mm256_mul_pd(_mm256_add_pd(t, t), p);

    // e*ln2 with a two-part constant to keep the tail
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    __m256d res = _mm256_fmadd_pd(e, ln2_lo, logm);
    res = _mm256_fmadd_pd(e, ln2_hi, res);
    return res;
}

inline __m256d pow_abs4(__m256d x, double p) {
    __m256d a = abs_pd(x);
    __m256d zero = _mm256_setzero_pd();
    __m256d is_zero = _mm256_cmp_pd(a, zero, _CMP_EQ_OQ);
    __m256d r = exp4(_mm256_mul_pd(_mm256_set1_pd(p), log4(a)));
    return _mm256_andnot_pd(is_zero, r);
}

// ---------------------------------------------------------------------------
// reductions
// ---------------------------------------------------------------------------

template <class StepFn>
inline void reduce_batch(const double* xs, std::size_t count, std::size_t dim,
                         const double* inv_w, double* out, double init, StepFn step,
                         void (*tail)(const double*, std::size_t, std::size_t,
                                      const double*, double*)) {
    std::size_t main = count - count % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes) {
        __m256d acc = _mm256_set1_pd(init);
        for (std::size_t j = 0; j < dim; ++j) {
            __m256d v = _mm256_loadu_pd(xs + j * count + i);
            if (inv_w) v = _mm256_mul_pd(v, _mm256_set1_pd(inv_w[j]));
            acc = step(acc, v);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    if (main < count) {
        // scalar tail over a repacked remainder keeps per-point order identical
        std::size_t rem = count - main;
        double tmp[3 * 64];
        if (dim <= 64) {
            for (std::size_t j = 0; j < dim; ++j)
                for (std::size_t i = 0; i < rem; ++i)
                    tmp[j * rem + i] = xs[j * count + main + i];
            tail(tmp, rem, dim, inv_w, out + main);
        } else {
            for (std::size_t i = main; i < count; ++i) {
                double acc = init;
                for (std::size_t j = 0; j < dim; ++j) {
                    double v = xs[j * count + i];
                    if (inv_w) v = v * inv_w[j];
                    __m256d a = _mm256_set1_pd(acc), b = _mm256_set1_pd(v);
                    acc = _mm256_cvtsd_f64(step(a, b));
                }
                out[i] = acc;
            }
        }
    }
}

void sum_abs_v(const double* xs, std::size_t count, std::size_t dim,
               const double* inv_w, double* out) {
    reduce_batch(
        xs, count, dim, inv_w, out, 0.0,
        [](__m256d acc, __m256d v) { return _mm256_add_pd(acc, abs_pd(v)); },
        scalar().sum_abs);
}

void sum_sq_v(const double* xs, std::size_t count, std::size_t dim,
              const double* inv_w, double* out) {
    reduce_batch(
        xs, count, dim, inv_w, out, 0.0,
        [](__m256d acc, __m256d v) { return _mm256_add_pd(acc, _mm256_mul_pd(v, v)); },
        scalar().sum_sq);
}

void max_abs_v(const double* xs, std::size_t count, std::size_t dim,
               const double* inv_w, double* out) {
    reduce_batch(
        xs, count, dim, inv_w, out, 0.0,
        [](__m256d acc, __m256d v) { return _mm256_max_pd(acc, abs_pd(v)); },
        scalar().max_abs);
}

void sum_abs_pow_v(const double* xs, std::size_t count, std::size_t dim,
                   const double* inv_w, double p, double* out) {
    std::size_t main = count - count % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < dim; ++j) {
            __m256d v = _mm256_loadu_pd(xs + j * count + i);
            if (inv_w) v = _mm256_mul_pd(v, _mm256_set1_pd(inv_w[j]));
            acc = _mm256_add_pd(acc, pow_abs4(v, p));
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (std::size_t i = main; i < count; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double v = xs[j * count + i];
            if (inv_w) v = v * inv_w[j];
            v = std::fabs(v);
            __m256d r = pow_abs4(_mm256_set1_pd(v), p);
            acc += _mm256_cvtsd_f64(r);
        }
        out[i] = acc;
    }
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

void vexp_v(const double* x, double* out, std::size_t n) {
    std::size_t main = n - n % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes)
        _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(x + i)));
    for (std::size_t i = main; i < n; ++i)
        out[i] = _mm256_cvtsd_f64(exp4(_mm256_set1_pd(x[i])));
}

void vlog_v(const double* x, double* out, std::size_t n) {
    std::size_t main = n - n % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes)
        _mm256_storeu_pd(out + i, log4(_mm256_loadu_pd(x + i)));
    for (std::size_t i = main; i < n; ++i)
        out[i] = _mm256_cvtsd_f64(log4(_mm256_set1_pd(x[i])));
}

void vpow_abs_v(const double* x, double p, double* out, std::size_t n) {
    std::size_t main = n - n % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes)
        _mm256_storeu_pd(out + i, pow_abs4(_mm256_loadu_pd(x + i), p));
    for (std::size_t i = main; i < n; ++i)
        out[i] = _mm256_cvtsd_f64(pow_abs4(_mm256_set1_pd(x[i]), p));
}

void vpow_int_v(const double* x, int k, double* out, std::size_t n) {
    std::size_t main = n - n % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes) {
        __m256d base = _mm256_loadu_pd(x + i);
        __m256d r = _mm256_set1_pd(1.0);
        unsigned e = static_cast<unsigned>(k);
        while (e) {
            if (e & 1u) r = _mm256_mul_pd(r, base);
            base = _mm256_mul_pd(base, base);
            e >>= 1;
        }
        _mm256_storeu_pd(out + i, r);
    }
    if (main < n) scalar().vpow_int(x + main, k, out + main, n - main);
}

void vsqrt_v(const double* x, double* out, std::size_t n) {
    std::size_t main = n - n % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes)
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_loadu_pd(x + i)));
    for (std::size_t i = main; i < n; ++i) out[i] = std::sqrt(x[i]);
}

void vrecip_v(const double* x, double* out, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t main = n - n % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes)
        _mm256_storeu_pd(out + i, _mm256_div_pd(one, _mm256_loadu_pd(x + i)));
    for (std::size_t i = main; i < n; ++i) out[i] = 1.0 / x[i];
}

void axpy_v(double a, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t main = n - n % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes) {
        __m256d t = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
    }
    if (main < n) scalar().axpy(a, x + main, y + main, n - main);
}

void scale_v(const double* x, double a, double* out, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t main = n - n % kLanes;
    for (std::size_t i = 0; i < main; i += kLanes)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    if (main < n) scalar().scale(x + main, a, out + main, n - main);
}

}  // namespace

const Ops& avx2() {
    static const Ops ops = {
        "avx2",      sum_abs_v, sum_sq_v, max_abs_v, sum_abs_pow_v,
        vexp_v,      vlog_v,    vpow_abs_v, vpow_int_v, vsqrt_v,
        vrecip_v,    axpy_v,    scale_v,
    };
    return ops;
}

bool avx2_available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace slicelab::kernels

#endif  // x86_64
