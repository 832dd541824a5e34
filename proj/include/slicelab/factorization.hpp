#pragma once

#include "slicelab/bodies.hpp"
#include "slicelab/measures.hpp"
#include "slicelab/quadrature.hpp"
#include "slicelab/sphere_opt.hpp"

#include <vector>

namespace slicelab {

// box factorization K ⊇ diag(t)·[-1,1]^n with K ⊆ n·diag(t)·B_1^n:
// t maximizes Π t_i over gauge(t) = 1, then both inclusions are verified
// by search (the outer bound is a certified lower bound of the true max)
struct SandwichReport {
    std::vector<double> t;
    double inner_margin = 0.0;  // worst corner gauge of the box, want <= 1
    bool inner_ok = false;
    double outer_max = 0.0;  // max of Σ|x_i|/t_i over the body, want <= n
    bool outer_ok = false;
};

SandwichReport lozanovskii_box(const StarBody& body, double tol = 1e-10,
                               std::vector<double> start = {});

SandwichReport verify_sandwich(const StarBody& body, const std::vector<double>& t);

// semi-axes of the largest-volume inscribed axis-aligned ellipsoid
std::vector<double> john_diagonal_ellipsoid(const StarBody& body, int iters = 1200);

// |K| · |K°|
double mahler_volume(const StarBody& body, const QuadScheme& s,
                     double* rel_err = nullptr);

struct VolumeRatioReport {
    std::vector<double> axes;      // inscribed diagonal ellipsoid semi-axes
    double ellipsoid_volume = 0.0;
    double body_volume = 0.0;
    double vr_upper = 0.0;         // (|K|/|E|)^{1/n}
    double mahler = 0.0;
    double santalo_ratio = 0.0;    // mahler / |B_2^n|²
    double rel_err = 0.0;          // summed relative volume errors
};

VolumeRatioReport volume_ratio_report(const StarBody& body, const QuadScheme& s);

}  // namespace slicelab
