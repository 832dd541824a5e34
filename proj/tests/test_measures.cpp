#include "doctest.h"

#include "slicelab/measures.hpp"
#include "slicelab/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace slicelab;

TEST_CASE("builtin density closed-form values") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    CHECK(leb(std::vector<double>{0.5, -2.0, 7.0}) == 1.0);

    auto gauss = builtin_density(DensityKind::gaussian, 1.0, 2);
    CHECK(gauss(std::vector<double>{0.0, 0.0}) ==
          doctest::Approx(1.0 / (2.0 * 3.14159265358979323846)).epsilon(1e-14));

    auto e1 = builtin_density(DensityKind::exp_l1, 0.0, 3);
    CHECK(e1(std::vector<double>{1.0, 1.0, 1.0}) ==
          doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
    CHECK(e1(std::vector<double>{-1.0, 2.0, -0.5}) ==
          doctest::Approx(std::exp(-3.5)).epsilon(1e-14));

    auto rp = builtin_density(DensityKind::radial_power, 2.0, 2);
    CHECK(rp(std::vector<double>{3.0, 4.0}) == doctest::Approx(25.0).epsilon(1e-14));

    auto bump = builtin_density(DensityKind::bump, 1.0, 2);
    CHECK(bump(std::vector<double>{0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(bump(std::vector<double>{1.0, 0.0}) == 0.0);
    CHECK(bump(std::vector<double>{2.0, 0.0}) == 0.0);
    CHECK(bump(std::vector<double>{0.5, 0.0}) ==
          doctest::Approx(std::exp(1.0 - 1.0 / 0.75)));
}

TEST_CASE("density construction validates parameters") {
    CHECK_THROWS_AS(builtin_density(DensityKind::gaussian, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(builtin_density(DensityKind::radial_power, -1.0, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(builtin_density(DensityKind::bump, -0.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(builtin_density("no-such", 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(builtin_density(DensityKind::lebesgue, 0.0, 0), std::invalid_argument);

    auto by_name = builtin_density("gaussian", 2.0, 3);
    CHECK(by_name.kind() == DensityKind::gaussian);
    CHECK(by_name.param() == 2.0);
}

TEST_CASE("densities are even and non-negative on 1000 samples") {
    std::vector<Density> ds = {
        builtin_density(DensityKind::lebesgue, 0.0, 3),
        builtin_density(DensityKind::gaussian, 0.7, 3),
        builtin_density(DensityKind::exp_l1, 0.0, 3),
        builtin_density(DensityKind::radial_power, 2.0, 3),
        builtin_density(DensityKind::bump, 1.5, 3),
    };
    for (const auto& d : ds) {
        CAPTURE(d.label());
        Rng rng(17);
        std::vector<double> x(3), neg(3);
        for (int s = 0; s < 1000; ++s) {
            for (int i = 0; i < 3; ++i) {
                x[i] = 2.0 * rng.normal();
                neg[i] = -x[i];
            }
            double v = d(x);
            REQUIRE(v >= 0.0);
            REQUIRE(d(neg) == v);
        }
    }
}

TEST_CASE("radial profiles match full evaluation") {
    std::vector<Density> ds = {
        builtin_density(DensityKind::gaussian, 1.3, 4),
        builtin_density(DensityKind::radial_power, 3.0, 4),
        builtin_density(DensityKind::bump, 2.0, 4),
        builtin_density(DensityKind::lebesgue, 0.0, 4),
    };
    Rng rng(31);
    for (const auto& d : ds) {
        CAPTURE(d.label());
        REQUIRE(d.is_radial());
        for (int s = 0; s < 100; ++s) {
            auto theta = rng.unit_vector(4);
            double r = 3.0 * rng.uniform();
            std::vector<double> x(4);
            for (int i = 0; i < 4; ++i) x[i] = r * theta[i];
            REQUIRE(d(x) == doctest::Approx(d.radial_profile(r)).epsilon(1e-12));
        }
    }
    CHECK_FALSE(builtin_density(DensityKind::exp_l1, 0.0, 2).is_radial());
}

TEST_CASE("custom densities are screened for evenness and sign") {
    auto ok = density_from_function(
        2, [](std::span<const double> x) { return x[0] * x[0] + std::fabs(x[1]); },
        "poly");
    CHECK(ok(std::vector<double>{1.0, -2.0}) == doctest::Approx(3.0));

    CHECK_THROWS_AS(density_from_function(
                        2, [](std::span<const double> x) { return x[0]; }, "odd"),
                    std::invalid_argument);
    CHECK_THROWS_AS(density_from_function(
                        2, [](std::span<const double> x) { return x[0] * x[0] - 100.0; },
                        "negative"),
                    std::invalid_argument);
}

TEST_CASE("density eval enforces dimension") {
    auto g = builtin_density(DensityKind::gaussian, 1.0, 3);
    CHECK_THROWS_AS((void)g(std::vector<double>{1.0, 2.0}), std::invalid_argument);
    CHECK(density_eval(g, std::vector<double>{0.0, 0.0, 0.0}) ==
          doctest::Approx(std::pow(2.0 * 3.14159265358979323846, -1.5)));
}
