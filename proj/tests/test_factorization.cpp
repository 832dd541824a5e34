#include "slicelab/factorization.hpp"

#include "slicelab/measures.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"

using namespace slicelab;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInfP = std::numeric_limits<double>::infinity();

QuadScheme det_scheme() {
    QuadScheme s;
    s.engine = Engine::deterministic;
    return s;
}

}  // namespace

TEST_CASE("box factorization of boxes returns the box itself") {
    auto cube = make_lp_ball(3, kInfP);
    auto rep = lozanovskii_box(cube);
    REQUIRE(rep.t.size() == 3);
    for (double v : rep.t) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.inner_ok);
    CHECK(rep.outer_ok);
    CHECK(rep.inner_margin == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.outer_max == doctest::Approx(3.0).epsilon(1e-6));

    auto box = make_lp_ball(2, kInfP, std::vector<double>{2.0, 3.0});
    auto repb = lozanovskii_box(box);
    CHECK(repb.t[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(repb.t[1] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(repb.inner_ok);
    CHECK(repb.outer_ok);
}

TEST_CASE("box factorization of the cross polytope balances all axes") {
    for (std::size_t n : {2, 3, 4}) {
        auto cross = make_lp_ball(n, 1.0);
        auto rep = lozanovskii_box(cross);
        for (double v : rep.t) CHECK(v == doctest::Approx(1.0 / double(n)).epsilon(1e-8));
        CHECK(rep.inner_ok);
        CHECK(rep.outer_ok);
        CHECK(rep.outer_max == doctest::Approx(double(n)).epsilon(1e-6));
    }
    // an asymmetric start must converge to the same box
    auto cross = make_lp_ball(3, 1.0);
    auto rep = lozanovskii_box(cross, 1e-10, {0.9, 0.05, 0.05});
    for (double v : rep.t) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("box factorization of the round ball hits the inscribed cube") {
    auto disc = make_lp_ball(2, 2.0);
    auto rep = lozanovskii_box(disc);
    for (double v : rep.t) CHECK(v == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(rep.outer_max == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(rep.inner_ok);
    CHECK(rep.outer_ok);
}

TEST_CASE("box factorization is equivariant under diagonal scaling") {
    auto body = make_lp_ball(3, 1.5);
    auto scaled = linear_image(body, DiagonalMap{{2.0, 0.5, 1.25}});
    auto rep = lozanovskii_box(body);
    auto reps = lozanovskii_box(scaled);
    CHECK(reps.t[0] == doctest::Approx(2.0 * rep.t[0]).epsilon(1e-7));
    CHECK(reps.t[1] == doctest::Approx(0.5 * rep.t[1]).epsilon(1e-7));
    CHECK(reps.t[2] == doctest::Approx(1.25 * rep.t[2]).epsilon(1e-7));
    CHECK(reps.inner_ok);
    CHECK(reps.outer_ok);
}

TEST_CASE("sandwich verification flags bad boxes") {
    auto disc = make_lp_ball(2, 2.0);
    // a box that pokes out of the disc
    auto bad = verify_sandwich(disc, {0.9, 0.9});
    CHECK(!bad.inner_ok);
    CHECK(bad.inner_margin > 1.0 + 1e-9);
    // a box so small the outer cross polytope misses the disc
    auto tiny = verify_sandwich(disc, {0.2, 0.2});
    CHECK(tiny.inner_ok);
    CHECK(!tiny.outer_ok);
    CHECK(tiny.outer_max == doctest::Approx(5.0 * std::sqrt(2.0)).epsilon(1e-6));

    CHECK_THROWS_AS((void)verify_sandwich(disc, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)verify_sandwich(disc, {1.0, -1.0}), std::invalid_argument);
    auto shear = linear_image(make_lp_ball(2, 2.0),
                              std::vector<double>{1.0, 1.0, 0.0, 1.0});
    CHECK_THROWS_AS((void)lozanovskii_box(shear), std::invalid_argument);
}

TEST_CASE("inscribed diagonal ellipsoids match closed forms") {
    auto disc = make_lp_ball(3, 2.0);
    auto a = john_diagonal_ellipsoid(disc);
    for (double v : a) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));

    auto ell = linear_image(make_lp_ball(3, 2.0), DiagonalMap{{3.0, 1.0, 1.0}});
    auto ae = john_diagonal_ellipsoid(ell);
    CHECK(ae[0] == doctest::Approx(3.0).epsilon(5e-3));
    CHECK(ae[1] == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(ae[2] == doctest::Approx(1.0).epsilon(5e-3));

    auto box = make_lp_ball(2, kInfP, std::vector<double>{2.0, 3.0});
    auto ab = john_diagonal_ellipsoid(box);
    CHECK(ab[0] == doctest::Approx(2.0).epsilon(5e-3));
    CHECK(ab[1] == doctest::Approx(3.0).epsilon(5e-3));

    // B_1^n admits the ball of radius n^{-1/2}
    auto diamond = make_lp_ball(2, 1.0);
    auto ad = john_diagonal_ellipsoid(diamond);
    CHECK(ad[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
    CHECK(ad[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
    auto cross = make_lp_ball(3, 1.0);
    auto ac = john_diagonal_ellipsoid(cross);
    for (double v : ac) CHECK(v == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-4));

    auto star = make_lp_ball(2, 0.5);
    CHECK_THROWS_AS((void)john_diagonal_ellipsoid(star), std::invalid_argument);
}

TEST_CASE("mahler products match classical values") {
    auto disc = make_lp_ball(2, 2.0);
    double err = -1.0;
    CHECK(mahler_volume(disc, det_scheme(), &err) ==
          doctest::Approx(kPi * kPi).epsilon(1e-9));
    CHECK(err >= 0.0);
    CHECK(err < 1e-5);

    auto diamond = make_lp_ball(2, 1.0);
    CHECK(mahler_volume(diamond, det_scheme()) == doctest::Approx(8.0).epsilon(1e-9));
    auto square = make_lp_ball(2, kInfP);
    CHECK(mahler_volume(square, det_scheme()) == doctest::Approx(8.0).epsilon(1e-9));

    auto ball3 = make_lp_ball(3, 2.0);
    double v3 = 4.0 * kPi / 3.0;
    CHECK(mahler_volume(ball3, det_scheme()) == doctest::Approx(v3 * v3).epsilon(1e-9));
}

TEST_CASE("volume ratio reports match closed forms") {
    auto disc = make_lp_ball(2, 2.0);
    auto rep = volume_ratio_report(disc, det_scheme());
    CHECK(rep.vr_upper == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(rep.santalo_ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.body_volume == doctest::Approx(kPi).epsilon(1e-9));

    auto square = make_lp_ball(2, kInfP);
    auto reps = volume_ratio_report(square, det_scheme());
    CHECK(reps.vr_upper == doctest::Approx(std::sqrt(4.0 / kPi)).epsilon(1e-3));
    CHECK(reps.santalo_ratio == doctest::Approx(8.0 / (kPi * kPi)).epsilon(1e-9));

    auto cube = make_lp_ball(3, kInfP);
    auto repc = volume_ratio_report(cube, det_scheme());
    CHECK(repc.vr_upper == doctest::Approx(std::cbrt(6.0 / kPi)).epsilon(1e-3));

    // ellipsoids keep ratio 1 and the santalo product exactly
    auto ell = linear_image(make_lp_ball(2, 2.0), DiagonalMap{{2.0, 0.5}});
    auto repe = volume_ratio_report(ell, det_scheme());
    CHECK(repe.vr_upper == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(repe.santalo_ratio == doctest::Approx(1.0).epsilon(1e-9));
}
