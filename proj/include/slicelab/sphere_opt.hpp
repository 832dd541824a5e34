#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace slicelab {

struct SphereOptConfig {
    int starts = 0;  // 0: 8(n+1)
    int max_iters = 200;
    double step_init = 0.5;
    double step_min = 1e-4;
    bool orthant_restrict = false;  // valid only for sign-invariant objectives
    std::uint64_t seed = 0;
};

struct SphereOptResult {
    std::vector<double> arg;           // unit vector
    double value = 0.0;
    std::vector<double> trace;         // best value per start
    std::uint64_t n_evals = 0;
};

// Multi-start derivative-free maximization over the unit sphere: compass
// probes in the tangent space, renormalization, step halving. Start set is
// coordinate axes, +/- diagonals, caller extras, then seeded random
// directions up to cfg.starts. Deterministic for fixed inputs; ties broken
// toward the lexicographically smallest argument. The result is a certified
// lower bound on the true maximum, nothing more.
SphereOptResult maximize_on_sphere(
    std::size_t n, const std::function<double(std::span<const double>)>& objective,
    const SphereOptConfig& cfg,
    const std::vector<std::vector<double>>& extra_starts = {});

}  // namespace slicelab
