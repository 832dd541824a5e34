#include "slicelab/measures.hpp"

#include "slicelab/rng.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slicelab {

double Density::operator()(std::span<const double> x) const {
    if (x.size() != n_) throw std::invalid_argument("density dimension mismatch");
    switch (kind_) {
        case DensityKind::lebesgue:
            return 1.0;
        case DensityKind::gaussian: {
            double s = 0.0;
            for (double c : x) s += c * c;
            return norm_const_ * std::exp(-s / (2.0 * param_ * param_));
        }
        case DensityKind::exp_l1: {
            double s = 0.0;
            for (double c : x) s += std::fabs(c);
            return std::exp(-s);
        }
        case DensityKind::radial_power: {
            double s = 0.0;
            for (double c : x) s += c * c;
            return std::pow(s, 0.5 * param_);
        }
        case DensityKind::bump: {
            double s = 0.0;
            for (double c : x) s += c * c;
            double t = s / (param_ * param_);
            if (t >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - t));
        }
        case DensityKind::custom:
            return fn_(x);
    }
    throw std::logic_error("unreachable density kind");
}

double Density::radial_profile(double r) const {
    switch (kind_) {
        case DensityKind::lebesgue:
            return 1.0;
        case DensityKind::gaussian:
            return norm_const_ * std::exp(-r * r / (2.0 * param_ * param_));
        case DensityKind::radial_power:
            return std::pow(r, param_);
        case DensityKind::bump: {
            double t = (r / param_) * (r / param_);
            if (t >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - t));
        }
        default:
            throw std::logic_error("radial profile of a non-radial density");
    }
}

Density builtin_density(DensityKind kind, double param, std::size_t n) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    std::ostringstream os;
    switch (kind) {
        case DensityKind::lebesgue: {
            Density d(n, kind, 0.0, "lebesgue");
            return d;
        }
        case DensityKind::gaussian: {
            if (!(param > 0.0)) throw std::invalid_argument("gaussian sigma must be > 0");
            os << "gaussian(" << param << ")";
            Density d(n, kind, param, os.str());
            d.norm_const_ =
                std::exp(-0.5 * double(n) * std::log(6.28318530717958647693 * param * param));
            return d;
        }
        case DensityKind::exp_l1: {
            Density d(n, kind, 0.0, "exp_l1");
            return d;
        }
        case DensityKind::radial_power: {
            if (param < 0.0) throw std::invalid_argument("radial power alpha must be >= 0");
            os << "radial_power(" << param << ")";
            Density d(n, kind, param, os.str());
            return d;
        }
        case DensityKind::bump: {
            if (!(param > 0.0)) throw std::invalid_argument("bump radius must be > 0");
            os << "bump(" << param << ")";
            Density d(n, kind, param, os.str());
            return d;
        }
        case DensityKind::custom:
            throw std::invalid_argument("custom densities come from density_from_function");
    }
    throw std::invalid_argument("unknown density kind");
}

Density builtin_density(const std::string& kind, double param, std::size_t n) {
    if (kind == "lebesgue") return builtin_density(DensityKind::lebesgue, 0.0, n);
    if (kind == "gaussian") return builtin_density(DensityKind::gaussian, param, n);
    if (kind == "exp_l1") return builtin_density(DensityKind::exp_l1, 0.0, n);
    if (kind == "radial_power") return builtin_density(DensityKind::radial_power, param, n);
    if (kind == "bump") return builtin_density(DensityKind::bump, param, n);
    throw std::invalid_argument("unknown density kind: " + kind);
}

Density density_from_function(std::size_t n,
                              std::function<double(std::span<const double>)> fn,
                              std::string label, int check_samples,
                              std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!fn) throw std::invalid_argument("density function required");

    Rng rng(seed, 0x646e73);
    std::vector<double> x(n), neg(n);
    for (int s = 0; s < check_samples; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = 3.0 * rng.normal();
            neg[i] = -x[i];
        }
        double v = fn(x);
        if (!(v >= 0.0))
            throw std::invalid_argument("density must be non-negative (violated at sample)");
        if (fn(neg) != v)
            throw std::invalid_argument("density must be even (violated at sample)");
    }

    Density d(n, DensityKind::custom, 0.0, std::move(label));
    d.fn_ = std::move(fn);
    return d;
}

double density_eval(const Density& d, std::span<const double> x) { return d(x); }

}  // namespace slicelab
