#include "slicelab/kernels.hpp"

#include <cfloat>
#include <cmath>

// Reference implementation. Deliberately plain loops: the AVX2 variant must
// reproduce these reductions bit-for-bit (no FMA contraction in either), so
// keep every accumulation in the same per-point coordinate order.

namespace slicelab::kernels {
namespace {

void sum_abs_s(const double* xs, std::size_t count, std::size_t dim,
               const double* inv_w, double* out) {
    for (std::size_t i = 0; i < count; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double v = xs[j * count + i];
            if (inv_w) v = v * inv_w[j];
            acc += std::fabs(v);
        }
        out[i] = acc;
    }
}

void sum_sq_s(const double* xs, std::size_t count, std::size_t dim,
              const double* inv_w, double* out) {
    for (std::size_t i = 0; i < count; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double v = xs[j * count + i];
            if (inv_w) v = v * inv_w[j];
            double sq = v * v;
            acc += sq;
        }
        out[i] = acc;
    }
}

void max_abs_s(const double* xs, std::size_t count, std::size_t dim,
               const double* inv_w, double* out) {
    for (std::size_t i = 0; i < count; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double v = xs[j * count + i];
            if (inv_w) v = v * inv_w[j];
            v = std::fabs(v);
            if (v > acc) acc = v;
        }
        out[i] = acc;
    }
}

void sum_abs_pow_s(const double* xs, std::size_t count, std::size_t dim,
                   const double* inv_w, double p, double* out) {
    for (std::size_t i = 0; i < count; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double v = xs[j * count + i];
            if (inv_w) v = v * inv_w[j];
            v = std::fabs(v);
            acc += (v == 0.0) ? 0.0 : std::pow(v, p);
        }
        out[i] = acc;
    }
}

void vexp_s(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void vlog_s(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = x[i];
        if (v < DBL_MIN) v = DBL_MIN;
        out[i] = std::log(v);
    }
}

void vpow_abs_s(const double* x, double p, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::fabs(x[i]);
        out[i] = (v == 0.0) ? 0.0 : std::pow(v, p);
    }
}

void vpow_int_s(const double* x, int k, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double base = x[i];
        double r = 1.0;
        unsigned e = static_cast<unsigned>(k);
        while (e) {
            if (e & 1u) r *= base;
            base *= base;
            e >>= 1;
        }
        out[i] = r;
    }
}

void vsqrt_s(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(x[i]);
}

void vrecip_s(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / x[i];
}

void axpy_s(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double t = a * x[i];
        y[i] += t;
    }
}

void scale_s(const double* x, double a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

}  // namespace

const Ops& scalar() {
    static const Ops ops = {
        "scalar",    sum_abs_s, sum_sq_s, max_abs_s, sum_abs_pow_s,
        vexp_s,      vlog_s,    vpow_abs_s, vpow_int_s, vsqrt_s,
        vrecip_s,    axpy_s,    scale_s,
    };
    return ops;
}

}  // namespace slicelab::kernels
