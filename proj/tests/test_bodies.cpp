#include "doctest.h"

#include "slicelab/bodies.hpp"
#include "slicelab/rng.hpp"

#include <cmath>
#include <vector>

using namespace slicelab;

namespace {

std::vector<double> unit(std::vector<double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    for (auto& c : v) c /= std::sqrt(s);
    return v;
}

}  // namespace

TEST_CASE("minkowski functional closed forms") {
    auto b1 = make_lp_ball(3, 1);
    CHECK(b1.minkowski(std::vector<double>{1.0, -2.0, 0.5}) == doctest::Approx(3.5));

    auto binf = make_lp_ball(2, kInf);
    CHECK(binf.minkowski(std::vector<double>{0.3, -0.9}) == doctest::Approx(0.9));

    auto b2 = make_lp_ball(4, 2);
    CHECK(b2.minkowski(std::vector<double>{1.0, 1.0, 1.0, 1.0}) == doctest::Approx(2.0));

    auto b15 = make_lp_ball(2, 1.5);
    double expect = std::pow(2.0, 2.0 / 3.0);
    CHECK(b15.minkowski(std::vector<double>{1.0, -1.0}) == doctest::Approx(expect));

    CHECK_THROWS_AS((void)b1.minkowski(std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("radial function and its reciprocal identity") {
    auto b2 = make_lp_ball(5, 2);
    auto theta = unit({1.0, -2.0, 0.5, 3.0, 0.1});
    CHECK(b2.radial(theta) == doctest::Approx(1.0).epsilon(1e-12));

    auto b1 = make_lp_ball(2, 1);
    CHECK(b1.radial(unit({1.0, 1.0})) == doctest::Approx(1.0 / std::sqrt(2.0)));

    auto cube = make_lp_ball(3, kInf);
    CHECK(cube.radial(unit({1.0, 1.0, 1.0})) == doctest::Approx(std::sqrt(3.0)));

    CHECK_THROWS_AS((void)b1.radial(std::vector<double>{1.0, 1.0}),
                    std::invalid_argument);

    // boundary point has gauge 1
    auto rho = cube.radial(unit({0.3, -0.8, 0.52}));
    auto theta2 = unit({0.3, -0.8, 0.52});
    std::vector<double> boundary(3);
    for (int i = 0; i < 3; ++i) boundary[i] = rho * theta2[i];
    CHECK(cube.minkowski(boundary) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lp ball construction validates inputs and sets flags") {
    CHECK_THROWS_AS(make_lp_ball(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_lp_ball(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_lp_ball(2, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_lp_ball(2, 2, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_lp_ball(2, 2, {1.0, -1.0}), std::invalid_argument);

    auto b3 = make_lp_ball(3, 3);
    CHECK(b3.flags().is_convex);
    CHECK(b3.flags().is_unconditional);
    CHECK_FALSE(b3.flags().is_intersection_body);

    auto b1 = make_lp_ball(3, 1);
    CHECK(b1.flags().is_intersection_body);
    auto b2 = make_lp_ball(3, 2);
    CHECK(b2.flags().is_intersection_body);

    auto star = make_lp_ball(3, 0.5);
    CHECK_FALSE(star.flags().is_convex);
    CHECK(star.flags().is_unconditional);

    auto box = make_lp_ball(2, kInf, {2.0, 3.0});
    CHECK(box.minkowski(std::vector<double>{2.0, 0.0}) == doctest::Approx(1.0));
    CHECK(box.minkowski(std::vector<double>{0.0, -3.0}) == doctest::Approx(1.0));
    CHECK(box.minkowski(std::vector<double>{2.0, 3.0}) == doctest::Approx(1.0));
}

TEST_CASE("linear images transform the gauge correctly") {
    auto b2 = make_lp_ball(2, 2);
    std::vector<double> ident = {1.0, 0.0, 0.0, 1.0};
    auto same = linear_image(b2, ident);
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x = {rng.normal(), rng.normal()};
        CHECK(same.minkowski(x) == doctest::Approx(b2.minkowski(x)).epsilon(1e-12));
    }

    auto ell = linear_image(b2, std::vector<double>{2.0, 0.0, 0.0, 1.0});
    CHECK(ell.minkowski(std::vector<double>{2.0, 0.0}) == doctest::Approx(1.0));
    CHECK(ell.flags().is_unconditional);
    CHECK(ell.flags().is_intersection_body);

    auto shear = linear_image(make_lp_ball(2, 1), std::vector<double>{1.0, 1.0, 0.0, 1.0});
    CHECK_FALSE(shear.flags().is_unconditional);
    CHECK(shear.flags().is_convex);

    CHECK_THROWS_AS(linear_image(b2, std::vector<double>{1.0, 1.0, 1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(linear_image(b2, std::vector<double>{1.0, 0.0}),
                    std::invalid_argument);

    // composition: image under T then S equals image under S*T
    std::vector<double> t = {1.0, 0.5, 0.0, 1.0};
    std::vector<double> s = {2.0, 0.0, 1.0, 1.0};
    std::vector<double> st = {2.0, 1.0, 1.0, 1.5};  // S*T
    auto two_step = linear_image(linear_image(b2, t), s);
    auto one_step = linear_image(b2, st);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x = {rng.normal(), rng.normal()};
        CHECK(two_step.minkowski(x) ==
              doctest::Approx(one_step.minkowski(x)).epsilon(1e-10));
    }
}

TEST_CASE("diagonal map type validates entries") {
    CHECK_THROWS_AS(DiagonalMap({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(DiagonalMap({-1.0}), std::invalid_argument);
    DiagonalMap d({2.0, 3.0});
    CHECK(d.determinant() == doctest::Approx(6.0));

    auto img = linear_image(make_lp_ball(2, 1), d);
    CHECK(img.flags().is_unconditional);
    CHECK(img.minkowski(std::vector<double>{2.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("polar duals of lp balls are exact") {
    auto b1 = make_lp_ball(3, 1);
    auto b1_polar = polar(b1);
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
        double linf = std::max({std::fabs(x[0]), std::fabs(x[1]), std::fabs(x[2])});
        CHECK(b1_polar.minkowski(x) == doctest::Approx(linf).epsilon(1e-12));
    }

    auto b2 = make_lp_ball(4, 2);
    auto b2_polar = polar(b2);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(4);
        for (auto& c : x) c = rng.normal();
        CHECK(b2_polar.minkowski(x) == doctest::Approx(b2.minkowski(x)).epsilon(1e-12));
    }

    // ellipsoid polarity: polar(diag(2,1) B2) = diag(1/2,1) B2
    auto ell = linear_image(make_lp_ball(2, 2), std::vector<double>{2.0, 0.0, 0.0, 1.0});
    auto ell_polar = polar(ell);
    CHECK(ell_polar.minkowski(std::vector<double>{1.0, 0.0}) == doctest::Approx(2.0));
    CHECK(ell_polar.minkowski(std::vector<double>{0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(ell_polar.flags().is_intersection_body);

    // weighted duality: dual of box [-2,2]x[-3,3] is the diamond |x/0.5|+|y/(1/3)|
    auto box = make_lp_ball(2, kInf, {2.0, 3.0});
    auto box_polar = polar(box);
    CHECK(box_polar.minkowski(std::vector<double>{0.5, 0.0}) == doctest::Approx(1.0));
    CHECK(box_polar.minkowski(std::vector<double>{0.0, 1.0 / 3.0}) == doctest::Approx(1.0));

    // bipolarity for lp chains
    auto back = polar(polar(make_lp_ball(3, 1.5)));
    auto orig = make_lp_ball(3, 1.5);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
        CHECK(back.minkowski(x) == doctest::Approx(orig.minkowski(x)).epsilon(1e-6));
    }

    CHECK_THROWS_AS(polar(make_lp_ball(2, 0.5)), std::invalid_argument);
}

TEST_CASE("searched polar approximates the known dual") {
    // same gauge as B1^2 but opaque, forcing the support-function search
    BodyFlags flags;
    flags.is_convex = true;
    flags.is_unconditional = true;
    auto opaque = custom_body(
        2,
        [](std::span<const double> x) { return std::fabs(x[0]) + std::fabs(x[1]); },
        flags, "opaque-diamond");

    auto searched = polar(opaque);
    Rng rng(23);
    for (int i = 0; i < 60; ++i) {
        std::vector<double> x = {rng.normal(), rng.normal()};
        double linf = std::max(std::fabs(x[0]), std::fabs(x[1]));
        CHECK(searched.minkowski(x) == doctest::Approx(linf).epsilon(1e-6));
    }

    // bipolar of the searched polar returns to the wrapped body exactly
    auto round_trip = polar(searched);
    for (int i = 0; i < 60; ++i) {
        std::vector<double> x = {rng.normal(), rng.normal()};
        CHECK(round_trip.minkowski(x) ==
              doctest::Approx(opaque.minkowski(x)).epsilon(1e-12));
    }
}

TEST_CASE("unconditionality witness separates symmetric from sheared bodies") {
    for (double p : {1.0, 2.0, 3.0}) {
        auto rep = unconditionality_witness(make_lp_ball(3, p), 200, 42);
        CHECK(rep.max_deviation == 0.0);
    }

    auto diag_img = linear_image(make_lp_ball(3, 1), DiagonalMap({1.0, 2.0, 0.5}));
    CHECK(unconditionality_witness(diag_img, 200, 43).max_deviation == 0.0);

    auto shear = linear_image(make_lp_ball(2, 1), std::vector<double>{1.0, 1.0, 0.0, 1.0});
    auto rep = unconditionality_witness(shear, 100, 44);
    CHECK(rep.max_deviation > 0.1);

    CHECK_THROWS_AS(unconditionality_witness(shear, 0, 1), std::invalid_argument);
}

TEST_CASE("gauge invariants hold on 1000 sampled points") {
    std::vector<StarBody> bodies;
    bodies.push_back(make_lp_ball(3, 1));
    bodies.push_back(make_lp_ball(3, 2));
    bodies.push_back(make_lp_ball(3, kInf));
    bodies.push_back(make_lp_ball(4, 1.5));
    bodies.push_back(make_lp_ball(2, kInf, {2.0, 3.0}));
    bodies.push_back(linear_image(make_lp_ball(3, 1), DiagonalMap({1.0, 2.0, 0.5})));
    bodies.push_back(
        linear_image(make_lp_ball(2, 2), std::vector<double>{1.0, 0.7, 0.0, 1.0}));
    bodies.push_back(make_lp_ball(3, 0.5));

    for (const auto& body : bodies) {
        CAPTURE(body.label());
        std::size_t n = body.dim();
        Rng rng(1234);
        for (int s = 0; s < 1000; ++s) {
            std::vector<double> x(n), neg(n);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = rng.normal();
                neg[i] = -x[i];
            }
            double g = body.minkowski(x);
            REQUIRE(g > 0.0);

            // symmetry must be exact
            REQUIRE(body.minkowski(neg) == g);

            double lam = 0.25 + 3.0 * rng.uniform();
            std::vector<double> lx(n);
            for (std::size_t i = 0; i < n; ++i) lx[i] = lam * x[i];
            REQUIRE(body.minkowski(lx) == doctest::Approx(lam * g).epsilon(1e-10));

            if (body.flags().is_unconditional) {
                std::vector<double> fx(n);
                for (std::size_t i = 0; i < n; ++i)
                    fx[i] = (rng.next() & 1) ? -x[i] : x[i];
                REQUIRE(body.minkowski(fx) == g);
            }
            if (body.flags().is_convex && s < 300) {
                std::vector<double> y(n), xy(n);
                for (std::size_t i = 0; i < n; ++i) {
                    y[i] = rng.normal();
                    xy[i] = x[i] + y[i];
                }
                REQUIRE(body.minkowski(xy) <=
                        g + body.minkowski(y) + 1e-12 * (g + body.minkowski(y)));
            }
        }

        // radial * minkowski = 1 on unit directions
        Rng rng2(99);
        for (int s = 0; s < 100; ++s) {
            auto theta = rng2.unit_vector(n);
            REQUIRE(body.radial(theta) * body.minkowski(theta) ==
                    doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("batch gauge agrees with pointwise gauge") {
    auto bodies = {make_lp_ball(3, 1), make_lp_ball(3, 2), make_lp_ball(3, kInf),
                   make_lp_ball(3, 1.5),
                   linear_image(make_lp_ball(3, 2),
                                std::vector<double>{1.0, 0.2, 0.0, 0.0, 1.0, 0.3, 0.1,
                                                    0.0, 1.0})};
    Rng rng(5);
    const std::size_t count = 257;
    for (const auto& body : bodies) {
        std::vector<double> xs(3 * count);
        for (auto& v : xs) v = rng.normal();
        std::vector<double> got(count);
        body.minkowski_batch(xs.data(), count, got.data());
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<double> pt = {xs[i], xs[count + i], xs[2 * count + i]};
            REQUIRE(got[i] == doctest::Approx(body.minkowski(pt)).epsilon(1e-12));
        }
    }
}

TEST_CASE("radial-oracle bodies satisfy the reciprocal identity") {
    BodyFlags flags;
    flags.is_intersection_body = true;
    auto ball_pi = custom_radial_body(
        3, [](std::span<const double>) { return 3.14159265358979; }, flags, "pi-ball");
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        auto theta = rng.unit_vector(3);
        CHECK(ball_pi.radial(theta) == doctest::Approx(3.14159265358979));
        CHECK(ball_pi.radial(theta) * ball_pi.minkowski(theta) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    // scaling a point off the unit sphere still works through homogeneity
    CHECK(ball_pi.minkowski(std::vector<double>{2.0, 0.0, 0.0}) ==
          doctest::Approx(2.0 / 3.14159265358979));
}

TEST_CASE("flag overrides keep the gauge but change declarations") {
    auto cube = make_lp_ball(3, kInf);
    BodyFlags f = cube.flags();
    f.is_intersection_body = true;
    auto cube2 = override_flags(cube, f);
    CHECK(cube2.flags().is_intersection_body);
    CHECK(cube2.minkowski(std::vector<double>{0.3, -0.9, 0.1}) ==
          doctest::Approx(0.9));
}
