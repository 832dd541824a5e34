#include "slicelab/sphere_opt.hpp"

#include "slicelab/detail/basis.hpp"
#include "slicelab/linalg.hpp"
#include "slicelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slicelab {
namespace {

void fold_orthant(std::vector<double>& v) {
    for (auto& c : v) c = std::fabs(c);
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

SphereOptResult maximize_on_sphere(
    std::size_t n, const std::function<double(std::span<const double>)>& objective,
    const SphereOptConfig& cfg, const std::vector<std::vector<double>>& extra_starts) {
    if (n < 2) throw std::invalid_argument("sphere search needs dimension >= 2");

    int want = cfg.starts > 0 ? cfg.starts : int(8 * (n + 1));
    std::vector<std::vector<double>> starts;
    starts.reserve(std::size_t(want) + extra_starts.size());

    for (std::size_t i = 0; i < n && int(starts.size()) < want; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        starts.push_back(e);
    }
    // diagonal sign patterns, capped; orthant folding collapses them to one
    std::size_t diag_cap = cfg.orthant_restrict ? 1 : std::min<std::size_t>(
        std::size_t(1) << (n - 1), 64);
    double inv_sqrt_n = 1.0 / std::sqrt(double(n));
    for (std::size_t mask = 0; mask < diag_cap && int(starts.size()) < want; ++mask) {
        std::vector<double> d(n, inv_sqrt_n);
        for (std::size_t b = 0; b + 1 < n; ++b)
            if (mask >> b & 1) d[b + 1] = -inv_sqrt_n;
        starts.push_back(d);
    }
    for (const auto& s : extra_starts) {
        if (s.size() != n) throw std::invalid_argument("start dimension mismatch");
        auto v = s;
        linalg::normalize(v);
        starts.push_back(v);
    }
    Rng rng(cfg.seed, 0x73746172);
    while (int(starts.size()) < want) starts.push_back(rng.unit_vector(n));

    SphereOptResult res;
    res.trace.reserve(starts.size());

    for (auto& start : starts) {
        std::vector<double> theta = start;
        if (cfg.orthant_restrict) fold_orthant(theta);
        linalg::normalize(theta);

        double best = objective(theta);
        ++res.n_evals;
        double step = cfg.step_init;
        auto basis = detail::orthonormal_complement(theta);

        for (int iter = 0; iter < cfg.max_iters && step >= cfg.step_min; ++iter) {
            double cand_val = best;
            std::vector<double> cand;
            for (const auto& b : basis) {
                for (double sgn : {1.0, -1.0}) {
                    std::vector<double> probe(n);
                    for (std::size_t i = 0; i < n; ++i)
                        probe[i] = theta[i] + sgn * step * b[i];
                    if (cfg.orthant_restrict) fold_orthant(probe);
                    linalg::normalize(probe);
                    double v = objective(probe);
                    ++res.n_evals;
                    if (v > cand_val) {
                        cand_val = v;
                        cand = std::move(probe);
                    }
                }
            }
            if (!cand.empty()) {
                theta = std::move(cand);
                best = cand_val;
                basis = detail::orthonormal_complement(theta);
            } else {
                step *= 0.5;
            }
        }

        res.trace.push_back(best);
        if (res.arg.empty() || best > res.value ||
            (best == res.value && lex_less(theta, res.arg))) {
            res.value = best;
            res.arg = theta;
        }
    }
    return res;
}

}  // namespace slicelab
