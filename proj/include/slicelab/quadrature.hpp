#pragma once

#include "slicelab/bodies.hpp"
#include "slicelab/measures.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace slicelab {

struct Estimate {
    double value = 0.0;
    // bound-style for deterministic rules, standard error for Monte Carlo
    double err = 0.0;
    std::string method;
    std::uint64_t n_evals = 0;
};

enum class Engine { deterministic, monte_carlo, grid_oracle };

Engine engine_from_string(const std::string& s);
std::string engine_to_string(Engine e);

struct QuadScheme {
    Engine engine = Engine::deterministic;
    int radial_nodes = 64;
    // Gauss-Legendre order per chart coordinate for the deterministic sphere
    // rule; 0 picks a per-dimension default.
    int sphere_nodes = 0;
    int mc_samples = 65536;
    std::uint64_t seed = 0;
    double target_rel_err = 0.0;  // 0: 1e-6 deterministic, 1e-3 Monte Carlo
    bool adaptive = false;        // deterministic only: double nodes until target
    int threads = 0;              // 0: auto; results identical for any value
};

double default_target_rel_err(Engine e);

// Gauss-Legendre order used per chart coordinate when sphere_nodes is 0;
// dim is the integration dimension (n for bodies, n-1 for sections).
int default_sphere_order(std::size_t dim);

// Integral of the density over the body, by polar decomposition: sphere rule
// (or Monte Carlo directions) x radial Gauss-Legendre. The deterministic
// sphere rule integrates over box-facet charts and refuses n >= 5.
Estimate integrate_body(const StarBody& body, const Density& d, const QuadScheme& s);

// Integral over the central section body ∩ xi-perp, computed in an
// orthonormal basis of the hyperplane; xi must be unit within 1e-12.
// +xi and -xi produce identical evaluation points.
Estimate integrate_section(const StarBody& body, const Density& d,
                           std::span<const double> xi, const QuadScheme& s);

// n-1 orthonormal vectors spanning xi-perp (Householder construction).
std::vector<std::vector<double>> hyperplane_basis(std::span<const double> xi);

// Riemann-sum cross-check on a uniform grid, n <= 3 only; err is a coarse
// boundary-layer bound.
Estimate grid_oracle_volume(const StarBody& body, const Density& d, int resolution);

// surface measure of S^{n-1}
double sphere_surface(std::size_t n);

}  // namespace slicelab
