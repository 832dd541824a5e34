#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace slicelab {

enum class DensityKind { lebesgue, gaussian, exp_l1, radial_power, bump, custom };

// Even, continuous, non-negative density on R^n. Built-in kinds carry enough
// structure (radial profile, l1-ray form) for quadrature fast paths.
class Density {
public:
    std::size_t dim() const { return n_; }
    const std::string& label() const { return label_; }
    bool is_even() const { return true; }
    DensityKind kind() const { return kind_; }
    double param() const { return param_; }

    double operator()(std::span<const double> x) const;

    // true when g(x) depends only on |x|_2
    bool is_radial() const {
        return kind_ == DensityKind::lebesgue || kind_ == DensityKind::gaussian ||
               kind_ == DensityKind::radial_power || kind_ == DensityKind::bump;
    }
    // g at radius r for radial kinds
    double radial_profile(double r) const;

    friend Density builtin_density(DensityKind kind, double param, std::size_t n);
    friend Density density_from_function(
        std::size_t n, std::function<double(std::span<const double>)> fn,
        std::string label, int check_samples, std::uint64_t seed);

private:
    Density(std::size_t n, DensityKind kind, double param, std::string label)
        : n_(n), kind_(kind), param_(param), label_(std::move(label)) {}

    std::size_t n_ = 0;
    DensityKind kind_ = DensityKind::lebesgue;
    double param_ = 0.0;
    double norm_const_ = 1.0;  // gaussian normalization
    std::string label_;
    std::function<double(std::span<const double>)> fn_;
};

// kinds: lebesgue, gaussian (param = sigma), exp_l1, radial_power
// (param = alpha >= 0), bump (param = support radius).
Density builtin_density(DensityKind kind, double param, std::size_t n);
Density builtin_density(const std::string& kind, double param, std::size_t n);

// Wraps a user function; evenness and non-negativity are verified on sampled
// points and violations are rejected.
Density density_from_function(std::size_t n,
                              std::function<double(std::span<const double>)> fn,
                              std::string label, int check_samples = 256,
                              std::uint64_t seed = 0x6d656173);

double density_eval(const Density& d, std::span<const double> x);

}  // namespace slicelab
