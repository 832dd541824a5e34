#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace slicelab {

// Flags are declared by constructors, never inferred; witness operations can
// falsify a wrong declaration but nothing in the library guesses.
struct BodyFlags {
    bool is_convex = false;
    bool is_unconditional = false;
    bool is_intersection_body = false;
};

struct DiagonalMap {
    std::vector<double> diag;

    explicit DiagonalMap(std::vector<double> d);
    double determinant() const;
};

// Budget for support-function maximization when an exact polar is unknown.
struct SupportSearchConfig {
    int starts = 64;
    int max_iters = 200;
    double step_init = 0.5;
    double step_min = 1e-9;
    std::uint64_t seed = 0x706f6c6172;
};

namespace detail {
class BodyCore;
}

class StarBody {
public:
    std::size_t dim() const;
    const BodyFlags& flags() const;
    const std::string& label() const;

    // Minkowski functional ||x||: 1-homogeneous, even, 0 only at 0.
    double minkowski(std::span<const double> x) const;

    // Batch form over coordinate-major storage: xs[j*count + i] is coordinate
    // j of point i. Writes one gauge value per point.
    void minkowski_batch(const double* xs, std::size_t count, double* out) const;

    // rho(theta) = 1/||theta||; requires |theta|_2 = 1 within 1e-12.
    double radial(std::span<const double> theta) const;

    // radial along an arbitrary nonzero direction (scale-invariant form).
    double radial_ray(std::span<const double> dir) const;

    StarBody(std::shared_ptr<const detail::BodyCore> core, BodyFlags flags,
             std::string label);
    const detail::BodyCore& core() const { return *core_; }
    std::shared_ptr<const detail::BodyCore> core_ptr() const { return core_; }

private:
    std::shared_ptr<const detail::BodyCore> core_;
    BodyFlags flags_;
    std::string label_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Unit ball of (sum |x_i/w_i|^p)^(1/p), max-form for p = inf. Weights
// default to 1. p in (0,1) yields a star (non-convex) body.
StarBody make_lp_ball(std::size_t n, double p, std::vector<double> weights = {},
                      std::string label = {});

// Body T(B) with ||x|| = ||T^{-1}x||_B; matrix row-major n x n, rejected if
// numerically singular.
StarBody linear_image(const StarBody& body, const std::vector<double>& matrix,
                      std::string label = {});
StarBody linear_image(const StarBody& body, const DiagonalMap& map,
                      std::string label = {});
StarBody scale_body(const StarBody& body, double s);

// Polar body: exact dual for lp balls and their linear images, support-
// function search otherwise. Requires is_convex.
StarBody polar(const StarBody& body, const SupportSearchConfig& cfg = {});

// Arbitrary gauge oracle; caller declares the flags it can vouch for.
StarBody custom_body(std::size_t n,
                     std::function<double(std::span<const double>)> gauge,
                     BodyFlags flags, std::string label);

// Body given by its radial function on unit directions (gauge is the
// homogeneous reciprocal extension).
StarBody custom_radial_body(std::size_t n,
                            std::function<double(std::span<const double>)> radial_fn,
                            BodyFlags flags, std::string label);

struct UnconditionalityReport {
    double max_deviation = 0.0;
    std::vector<double> worst_x;
    std::vector<int> worst_signs;
};

// Samples points and sign patterns; max |(gauge of flipped x) - (gauge of x)|.
UnconditionalityReport unconditionality_witness(const StarBody& body,
                                                int sample_count,
                                                std::uint64_t seed);

// Same body, different declared flags (e.g. config vouches a box is an
// intersection body in low dimension).
StarBody override_flags(const StarBody& body, BodyFlags flags);

double minkowski(const StarBody& body, std::span<const double> x);
double radial(const StarBody& body, std::span<const double> theta);

}  // namespace slicelab
