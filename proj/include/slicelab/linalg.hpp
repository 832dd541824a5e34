#pragma once

#include "slicelab/rng.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace slicelab::linalg {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void normalize(std::vector<double>& a) {
    double n = norm2(a);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    for (auto& c : a) c /= n;
}

// y = M x, M row-major n x n
inline std::vector<double> matvec(const std::vector<double>& m,
                                  std::span<const double> x) {
    std::size_t n = x.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * x[j];
        y[i] = s;
    }
    return y;
}

inline std::vector<double> transpose(const std::vector<double>& m, std::size_t n) {
    std::vector<double> t(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t[j * n + i] = m[i * n + j];
    return t;
}

// C = A B, both row-major n x n
inline std::vector<double> matmul(const std::vector<double>& a,
                                  const std::vector<double>& b, std::size_t n) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            double aik = a[i * n + k];
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    return c;
}

// Gauss-Jordan with partial pivoting; throws on numerically singular input.
inline std::vector<double> invert(std::vector<double> m, std::size_t n) {
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;

    double max_abs = 0.0;
    for (double v : m) max_abs = std::max(max_abs, std::fabs(v));
    if (max_abs == 0.0) throw std::invalid_argument("singular matrix");

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(m[r * n + col]) > std::fabs(m[piv * n + col])) piv = r;
        if (std::fabs(m[piv * n + col]) < 1e-12 * max_abs)
            throw std::invalid_argument("singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m[piv * n + j], m[col * n + j]);
                std::swap(inv[piv * n + j], inv[col * n + j]);
            }
        }
        double d = 1.0 / m[col * n + col];
        for (std::size_t j = 0; j < n; ++j) {
            m[col * n + j] *= d;
            inv[col * n + j] *= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = m[r * n + col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                m[r * n + j] -= f * m[col * n + j];
                inv[r * n + j] -= f * inv[col * n + j];
            }
        }
    }
    return inv;
}

inline double determinant(std::vector<double> m, std::size_t n) {
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(m[r * n + col]) > std::fabs(m[piv * n + col])) piv = r;
        if (m[piv * n + col] == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m[piv * n + j], m[col * n + j]);
            det = -det;
        }
        det *= m[col * n + col];
        double d = 1.0 / m[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = m[r * n + col] * d;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) m[r * n + j] -= f * m[col * n + j];
        }
    }
    return det;
}

// Haar-ish random rotation: QR of a Gaussian matrix, sign-fixed, det +1.
inline std::vector<double> random_rotation(std::size_t n, std::uint64_t seed) {
    Rng rng(seed, 0x5e7a);
    std::vector<double> q(n * n);
    // columns via Gram-Schmidt on Gaussian vectors
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> v(n);
        while (true) {
            for (auto& x : v) x = rng.normal();
            for (std::size_t c2 = 0; c2 < c; ++c2) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += q[i * n + c2] * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= s * q[i * n + c2];
            }
            double nv = norm2(v);
            if (nv > 1e-6) {
                for (std::size_t i = 0; i < n; ++i) q[i * n + c] = v[i] / nv;
                break;
            }
        }
    }
    if (determinant(q, n) < 0)
        for (std::size_t i = 0; i < n; ++i) q[i * n] = -q[i * n];
    return q;
}

}  // namespace slicelab::linalg
