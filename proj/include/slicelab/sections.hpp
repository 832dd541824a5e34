#pragma once

#include "slicelab/bodies.hpp"
#include "slicelab/measures.hpp"
#include "slicelab/quadrature.hpp"
#include "slicelab/sphere_opt.hpp"

#include <cstdint>
#include <vector>

namespace slicelab {

struct MaxSectionResult {
    std::vector<double> xi_star;
    Estimate value;  // full-scheme estimate at xi_star, a certified lower bound
    std::size_t starts = 0;
    std::vector<double> trace;  // best search objective per accepted iteration
};

enum class OrthantPolicy { automatic, on, off };

// largest central hyperplane section of `body` weighted by `d`, located by
// multi-start compass search at a reduced scheme and re-measured at `s`
MaxSectionResult max_section(const StarBody& body, const Density& d,
                             const QuadScheme& s, const SphereOptConfig& opt = {},
                             OrthantPolicy policy = OrthantPolicy::automatic);

// star body whose radial function along u is the section measure of `base`
// at u^⊥; values are cached per direction
StarBody intersection_body_of(const StarBody& base, const Density& d,
                              const QuadScheme& s);

// sup-norm distance between radial functions, sampled over the coordinate
// axes, sign diagonals and `samples` seeded random directions
double radial_distance(const StarBody& a, const StarBody& b, int samples = 4096,
                       std::uint64_t seed = 0x726164);

}  // namespace slicelab
