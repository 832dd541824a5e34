#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace slicelab::detail {

// Orthonormal basis of xi-perp via one Householder reflection. The sign of
// xi is canonicalized first (first nonzero component positive), so +xi and
// -xi produce the identical basis.
inline std::vector<std::vector<double>> orthonormal_complement(
    std::span<const double> xi_in) {
    std::size_t n = xi_in.size();
    if (n < 2) throw std::invalid_argument("complement needs dimension >= 2");
    std::vector<double> xi(xi_in.begin(), xi_in.end());
    for (double c : xi) {
        if (c != 0.0) {
            if (c < 0.0)
                for (auto& v : xi) v = -v;
            break;
        }
    }

    // v = xi + s*e_n, H = I - 2vv^T/(v.v); then He_j (j < n) spans xi-perp
    double s = (xi[n - 1] >= 0.0) ? 1.0 : -1.0;
    std::vector<double> v = xi;
    v[n - 1] += s;
    double vv = 0.0;
    for (double c : v) vv += c * c;

    std::vector<std::vector<double>> basis(n - 1, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j + 1 < n; ++j) {
        double f = 2.0 * v[j] / vv;
        for (std::size_t i = 0; i < n; ++i) basis[j][i] = -f * v[i];
        basis[j][j] += 1.0;
    }
    return basis;
}

}  // namespace slicelab::detail
