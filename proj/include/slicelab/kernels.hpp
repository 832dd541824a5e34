#pragma once

#include <cstddef>
#include <string>

namespace slicelab::kernels {

// Batch layout is coordinate-major: xs[j*count + i] holds coordinate j of
// point i. All kernels are pure and safe for concurrent use.
//
// Two implementations exist: a scalar reference and an AVX2 variant selected
// at runtime. The reduction kernels (sum_abs, sum_sq, max_abs, pow_int,
// axpy, scale) perform the same per-point operation sequence in both
// variants and match bit-for-bit; the transcendental kernels (vexp, vlog,
// vpow_abs, sum_abs_pow) use polynomial cores in the SIMD variant and agree
// with the scalar reference to a few ulp (see test_kernels).
struct Ops {
    const char* name;

    // Per-point reductions over coordinates. inv_w may be null; when given,
    // coordinate j is scaled by inv_w[j] before the reduction.
    void (*sum_abs)(const double* xs, std::size_t count, std::size_t dim,
                    const double* inv_w, double* out);
    void (*sum_sq)(const double* xs, std::size_t count, std::size_t dim,
                   const double* inv_w, double* out);
    void (*max_abs)(const double* xs, std::size_t count, std::size_t dim,
                    const double* inv_w, double* out);
    // sum over j of |inv_w[j]*xs[j,i]|^p, p > 0
    void (*sum_abs_pow)(const double* xs, std::size_t count, std::size_t dim,
                        const double* inv_w, double p, double* out);

    // Elementwise arrays.
    void (*vexp)(const double* x, double* out, std::size_t n);
    // requires x > 0 (subnormals are clamped to DBL_MIN)
    void (*vlog)(const double* x, double* out, std::size_t n);
    // |x|^p with 0^p = 0; requires p >= 0
    void (*vpow_abs)(const double* x, double p, double* out, std::size_t n);
    // x^k by repeated squaring, k >= 0
    void (*vpow_int)(const double* x, int k, double* out, std::size_t n);
    void (*vsqrt)(const double* x, double* out, std::size_t n);
    void (*vrecip)(const double* x, double* out, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // out[i] = a * x[i]
    void (*scale)(const double* x, double a, double* out, std::size_t n);
};

const Ops& scalar();

#if defined(__x86_64__) || defined(_M_X64)
bool avx2_available();
const Ops& avx2();
#endif

// Currently dispatched implementation. Defaults to the best available;
// honors the SLICELAB_KERNEL environment variable ("scalar", "avx2", "auto")
// on first use.
const Ops& active();

// Force a specific implementation ("auto", "scalar", "avx2").
// Returns false if the named implementation is unavailable.
bool select(const std::string& name);

}  // namespace slicelab::kernels
