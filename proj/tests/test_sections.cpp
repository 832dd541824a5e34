#include "slicelab/sections.hpp"

#include "slicelab/linalg.hpp"
#include "slicelab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"

using namespace slicelab;

namespace {

constexpr double kPi = 3.14159265358979323846;

QuadScheme det_scheme() {
    QuadScheme s;
    s.engine = Engine::deterministic;
    return s;
}

}  // namespace

TEST_CASE("max section of the round ball is flat") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto ball = make_lp_ball(3, 2.0);
    auto res = max_section(ball, leb, det_scheme());
    CHECK(res.value.value == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(std::fabs(linalg::norm2(res.xi_star) - 1.0) < 1e-12);
    CHECK(res.starts == 32);
    CHECK(!res.trace.empty());
}

TEST_CASE("max section of the cube is the diagonal slab") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto cube = make_lp_ball(3, std::numeric_limits<double>::infinity());
    auto res = max_section(cube, leb, det_scheme());
    double ref = 4.0 * std::sqrt(2.0);
    CHECK(res.value.value == doctest::Approx(ref).epsilon(1e-3));
    // certified from below: never report more than the true maximum
    CHECK(res.value.value <= ref + res.value.err + 1e-6 * ref);

    std::vector<double> mags(res.xi_star.size());
    for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::fabs(res.xi_star[i]);
    std::sort(mags.begin(), mags.end());
    CHECK(mags[0] < 2e-2);
    CHECK(mags[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(3e-2));
    CHECK(mags[2] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(3e-2));
}

TEST_CASE("max section of the cross polytope is a coordinate slice") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto cross = make_lp_ball(3, 1.0);
    auto res = max_section(cross, leb, det_scheme());
    CHECK(res.value.value == doctest::Approx(2.0).epsilon(1e-4));
    std::vector<double> mags(3);
    for (std::size_t i = 0; i < 3; ++i) mags[i] = std::fabs(res.xi_star[i]);
    std::sort(mags.begin(), mags.end());
    CHECK(mags[2] > 0.999);
}

TEST_CASE("weighted max section prefers the plane containing the long axis") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto g = builtin_density(DensityKind::gaussian, 1.0, 3);
    auto ell = linear_image(make_lp_ball(3, 2.0), DiagonalMap{{3.0, 1.0, 1.0}});

    auto res = max_section(ell, leb, det_scheme());
    CHECK(res.value.value == doctest::Approx(3.0 * kPi).epsilon(1e-6));
    CHECK(std::fabs(res.xi_star[0]) < 1e-3);

    auto resg = max_section(ell, g, det_scheme());
    std::vector<double> e1 = {1.0, 0.0, 0.0};
    std::vector<double> e2 = {0.0, 1.0, 0.0};
    double at_e1 = integrate_section(ell, g, e1, det_scheme()).value;
    double at_e2 = integrate_section(ell, g, e2, det_scheme()).value;
    CHECK(resg.value.value >= at_e1 - 1e-9);
    CHECK(resg.value.value >= at_e2 - 1e-9);
    CHECK(resg.value.value == doctest::Approx(at_e2).epsilon(1e-6));
}

TEST_CASE("max section in the plane reduces to the longest chord") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 2);
    auto square = make_lp_ball(2, std::numeric_limits<double>::infinity());
    auto res = max_section(square, leb, det_scheme());
    // longest chord of the square is its diagonal, cut by xi at 45 degrees
    CHECK(res.value.value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("orthant policy does not change the located maximum") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto box = make_lp_ball(3, std::numeric_limits<double>::infinity(),
                            std::vector<double>{1.0, 1.0, 2.0});
    auto a = max_section(box, leb, det_scheme(), {}, OrthantPolicy::automatic);
    auto b = max_section(box, leb, det_scheme(), {}, OrthantPolicy::off);
    CHECK(a.value.value == doctest::Approx(b.value.value).epsilon(1e-5));
    for (double c : a.xi_star) CHECK(c >= -1e-15);
}

TEST_CASE("search trace covers every start and reruns are identical") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto cube = make_lp_ball(3, std::numeric_limits<double>::infinity());
    auto a = max_section(cube, leb, det_scheme());
    auto b = max_section(cube, leb, det_scheme());
    CHECK(a.value.value == b.value.value);
    CHECK(a.xi_star == b.xi_star);
    REQUIRE(a.trace.size() == a.starts);
    double best = *std::max_element(a.trace.begin(), a.trace.end());
    CHECK(std::fabs(best - a.value.value) < 1e-2 * a.value.value);
}

TEST_CASE("intersection body of the round ball is a scaled ball") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto ball = make_lp_ball(3, 2.0);
    auto ib = intersection_body_of(ball, leb, det_scheme());
    CHECK(ib.flags().is_intersection_body);
    CHECK(!ib.flags().is_convex);
    CHECK(ib.flags().is_unconditional);
    CHECK(ib.label() == "I(B2^3)");

    std::vector<double> dirs[] = {
        {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.6, -0.8, 0.0}, {2.0, 1.0, -2.0}};
    for (auto& dir : dirs) {
        std::vector<double> u = dir;
        linalg::normalize(u);
        CHECK(ib.radial(u) == doctest::Approx(kPi).epsilon(1e-9));
    }
    auto scaled = linear_image(ball, DiagonalMap{{kPi, kPi, kPi}});
    CHECK(radial_distance(ib, scaled, 256) < 1e-8);
}

TEST_CASE("intersection body of the cross polytope matches hand-computed slices") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto cross = make_lp_ball(3, 1.0);
    auto ib = intersection_body_of(cross, leb, det_scheme());

    std::vector<double> e3 = {0.0, 0.0, 1.0};
    CHECK(ib.radial(e3) == doctest::Approx(2.0).epsilon(1e-7));

    // the diagonal slice of the cross polytope is a regular hexagon with
    // circumradius 1/sqrt(2), area 3*sqrt(3)/4
    std::vector<double> diag = {1.0, 1.0, 1.0};
    linalg::normalize(diag);
    CHECK(ib.radial(diag) == doctest::Approx(3.0 * std::sqrt(3.0) / 4.0).epsilon(1e-4));

    // gauge respects the defining radial function
    std::vector<double> x = {0.3, -0.4, 0.5};
    std::vector<double> u = x;
    linalg::normalize(u);
    CHECK(ib.minkowski(x) ==
          doctest::Approx(linalg::norm2(x) / ib.radial(u)).epsilon(1e-12));
}

TEST_CASE("intersection body values are cached and sign symmetric") {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto body = linear_image(make_lp_ball(3, 1.5), DiagonalMap{{1.0, 2.0, 0.5}});
    auto ib = intersection_body_of(body, leb, det_scheme());
    std::vector<double> u = {0.48, -0.6, 0.64};
    linalg::normalize(u);
    double first = ib.radial(u);
    double second = ib.radial(u);
    CHECK(first == second);
    std::vector<double> neg = {-u[0], -u[1], -u[2]};
    CHECK(ib.radial(neg) == first);
}

TEST_CASE("radial distance matches closed forms") {
    auto b2 = make_lp_ball(2, 2.0);
    CHECK(radial_distance(b2, b2) == 0.0);

    auto twice = linear_image(b2, DiagonalMap{{2.0, 2.0}});
    CHECK(radial_distance(b2, twice, 512) == doctest::Approx(1.0).epsilon(1e-12));

    auto diamond = make_lp_ball(2, 1.0);
    auto square = make_lp_ball(2, std::numeric_limits<double>::infinity());
    double ref = std::sqrt(2.0) - 1.0 / std::sqrt(2.0);
    CHECK(radial_distance(diamond, square, 2048) == doctest::Approx(ref).epsilon(1e-9));

    auto b3a = make_lp_ball(3, 2.0);
    auto b3b = linear_image(b3a, DiagonalMap{{1.1, 1.0, 1.0}});
    double d1 = radial_distance(b3a, b3b, 1024);
    CHECK(d1 == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(radial_distance(b3b, b3a, 1024) == d1);
}

TEST_CASE("section argument errors are reported") {
    auto leb2 = builtin_density(DensityKind::lebesgue, 0.0, 2);
    auto leb3 = builtin_density(DensityKind::lebesgue, 0.0, 3);
    auto ball = make_lp_ball(3, 2.0);
    CHECK_THROWS_AS((void)max_section(ball, leb2, det_scheme()), std::invalid_argument);
    QuadScheme grid;
    grid.engine = Engine::grid_oracle;
    CHECK_THROWS_AS((void)max_section(ball, leb3, grid), std::invalid_argument);
    CHECK_THROWS_AS((void)intersection_body_of(ball, leb2, det_scheme()),
                    std::invalid_argument);
    auto b2 = make_lp_ball(2, 2.0);
    CHECK_THROWS_AS((void)radial_distance(ball, b2), std::invalid_argument);
}
