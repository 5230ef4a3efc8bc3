#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "splkit/geometry.hpp"
#include "splkit/rng.hpp"

using namespace splkit;

namespace {
const CameraIntrinsics kCam{1000.0, 1000.0, 960.0, 540.0, 1920, 1080};
constexpr double kPi = 3.14159265358979323846;
}  // namespace

TEST_CASE("project maps the optical axis to the principal point", "[geometry]") {
    const Pixel px = project(kCam, {0.0, 0.0, 50.0});
    CHECK(px.u == Catch::Approx(960.0));
    CHECK(px.v == Catch::Approx(540.0));
}

TEST_CASE("project evaluates the pinhole formula", "[geometry]") {
    const Pixel px = project(kCam, {1.0, 0.0, 10.0});
    CHECK(px.u == Catch::Approx(1060.0));
    CHECK(px.v == Catch::Approx(540.0));
}

TEST_CASE("project rejects non-positive depth", "[geometry]") {
    CHECK_THROWS_AS(project(kCam, {0.0, 0.0, -5.0}), NonPositiveDepth);
    CHECK_THROWS_AS(project(kCam, {0.0, 0.0, 0.0}), NonPositiveDepth);
}

TEST_CASE("backproject inverts the stated examples", "[geometry]") {
    const Point3 a = backproject(kCam, {960.0, 540.0}, 50.0);
    CHECK(norm(a - Point3{0.0, 0.0, 50.0}) < 1e-12);
    const Point3 b = backproject(kCam, {1060.0, 540.0}, 10.0);
    CHECK(norm(b - Point3{1.0, 0.0, 10.0}) < 1e-12);
    CHECK_THROWS_AS(backproject(kCam, {960.0, 540.0}, 0.0), NonPositiveDepth);
}

TEST_CASE("project/backproject round trip over random points", "[geometry]") {
    Rng rng(20240811);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double z = rng.uniform(1e-3, 200.0);
        const Point3 p{rng.uniform(-50.0, 50.0), rng.uniform(-30.0, 30.0), z};
        const Point3 back = backproject(kCam, project(kCam, p), p.z);
        worst = std::max(worst, norm(back - p));
        const Pixel px{rng.uniform(-500.0, 2500.0), rng.uniform(-500.0, 1600.0)};
        const double depth = rng.uniform(1e-3, 1000.0);
        const Pixel again = project(kCam, backproject(kCam, px, depth));
        worst = std::max(worst, std::abs(again.u - px.u));
        worst = std::max(worst, std::abs(again.v - px.v));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("rotate by the identity is the identity", "[geometry]") {
    const Point3 p{1.5, -2.0, 3.0};
    CHECK(norm(rotate(Quaternion::identity(), p) - p) == 0.0);
}

TEST_CASE("rotate by 180 degrees about y negates x and z", "[geometry]") {
    const Quaternion q = Quaternion::from_axis_angle({0, 1, 0}, kPi);
    const Point3 p = rotate(q, {1.0, 0.0, 2.0});
    CHECK(norm(p - Point3{-1.0, 0.0, -2.0}) < 1e-12);
}

TEST_CASE("rotate agrees with the rotation-matrix oracle", "[geometry]") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Quaternion q =
            Quaternion{rng.normal(), rng.normal(), rng.normal(), rng.normal()}.normalized();
        const Point3 p{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const Point3 got = rotate(q, p);
        const Point3 want = oracle::apply(oracle::rotation_matrix(q), p);
        CHECK(norm(got - want) < 1e-12);
        CHECK(std::abs(norm(got) - norm(p)) < 1e-9);
        // inverse composition
        CHECK(norm(rotate(q.conjugate(), got) - p) < 1e-9);
    }
}

TEST_CASE("cuboid corners of an axis-aligned cube", "[geometry]") {
    const Cuboid3D cube{{0, 0, 0}, {2, 2, 2}, Quaternion::identity()};
    const auto corners = cuboid_corners(cube);
    // documented order: bit 0 -> +x, bit 1 -> +y, bit 2 -> +z
    CHECK(norm(corners[0] - Point3{-1, -1, -1}) < 1e-12);
    CHECK(norm(corners[1] - Point3{1, -1, -1}) < 1e-12);
    CHECK(norm(corners[2] - Point3{-1, 1, -1}) < 1e-12);
    CHECK(norm(corners[7] - Point3{1, 1, 1}) < 1e-12);
}

TEST_CASE("cube corner set is invariant under a quarter turn", "[geometry]") {
    const Cuboid3D cube{{0, 0, 0}, {2, 2, 2}, Quaternion::identity()};
    const Cuboid3D turned{{0, 0, 0}, {2, 2, 2}, Quaternion::from_axis_angle({0, 1, 0}, kPi / 2)};
    auto a = cuboid_corners(cube);
    auto b = cuboid_corners(turned);
    for (const Point3& pb : b) {
        const bool found = std::any_of(a.begin(), a.end(),
                                       [&](const Point3& pa) { return norm(pa - pb) < 1e-9; });
        CHECK(found);
    }
}

TEST_CASE("quarter turn about y swaps width and length extents", "[geometry]") {
    const Cuboid3D c{{0, 0, 0}, {2, 1, 4}, Quaternion::from_axis_angle({0, 1, 0}, kPi / 2)};
    double max_x = 0, max_z = 0;
    for (const Point3& p : cuboid_corners(c)) {
        max_x = std::max(max_x, std::abs(p.x));
        max_z = std::max(max_z, std::abs(p.z));
    }
    CHECK(max_x == Catch::Approx(2.0));
    CHECK(max_z == Catch::Approx(1.0));
}

TEST_CASE("cuboid corner centroid equals the center", "[geometry]") {
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        const Cuboid3D c{{rng.uniform(-20, 20), rng.uniform(-5, 5), rng.uniform(1, 100)},
                         {rng.uniform(0.5, 3), rng.uniform(0.5, 3), rng.uniform(0.5, 12)},
                         Quaternion{rng.normal(), rng.normal(), rng.normal(), rng.normal()}
                             .normalized()};
        const auto corners = cuboid_corners(c);
        Point3 centroid{0, 0, 0};
        for (const Point3& p : corners) centroid = centroid + p;
        centroid = centroid * (1.0 / 8.0);
        CHECK(norm(centroid - c.center) < 1e-9);
        // opposite corners are symmetric about the center
        for (int j = 0; j < 8; ++j) {
            const Point3 mirrored = c.center * 2.0 - corners[j];
            CHECK(norm(mirrored - corners[7 - j]) < 1e-9);
        }
    }
}

TEST_CASE("apparent orientation equals egocentric on the optical axis", "[geometry]") {
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const Quaternion q =
            Quaternion{rng.normal(), rng.normal(), rng.normal(), rng.normal()}.normalized();
        const Point3 center{0.0, 0.0, rng.uniform(1.0, 100.0)};
        CHECK(rotation_distance(apparent_from_egocentric(q, center), q) < 1e-12);
    }
}

TEST_CASE("apparent/egocentric conversion round-trips", "[geometry]") {
    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        const Quaternion q =
            Quaternion{rng.normal(), rng.normal(), rng.normal(), rng.normal()}.normalized();
        const Point3 center{rng.uniform(-50, 50), rng.uniform(-20, 20), rng.uniform(0.5, 200)};
        const Quaternion back = egocentric_from_apparent(apparent_from_egocentric(q, center), center);
        CHECK(rotation_distance(back, q) < 1e-9);
        const Quaternion fwd = apparent_from_egocentric(egocentric_from_apparent(q, center), center);
        CHECK(rotation_distance(fwd, q) < 1e-9);
    }
}

TEST_CASE("45-degree lateral ray tilts the apparent orientation by -45 degrees", "[geometry]") {
    const Point3 center{10.0, 0.0, 10.0};
    const Quaternion q_app = apparent_from_egocentric(Quaternion::identity(), center);
    // oracle: the apparent frame rotates the viewing ray back onto +z
    const Quaternion expected = Quaternion::from_axis_angle({0, 1, 0}, -kPi / 4);
    CHECK(rotation_distance(q_app, expected) < 1e-12);
    const oracle::Mat3 m = oracle::rotation_matrix(q_app);
    const Point3 z_in_app = oracle::apply(m, {0, 0, 1});
    // rotating +z by the apparent orientation must give the -45 degree ray
    CHECK(z_in_app.x == Catch::Approx(-std::sqrt(0.5)).margin(1e-12));
    CHECK(z_in_app.z == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
}

TEST_CASE("apparent conversion rejects non-positive depth", "[geometry]") {
    CHECK_THROWS_AS(apparent_from_egocentric(Quaternion::identity(), {1.0, 0.0, -2.0}),
                    NonPositiveDepth);
    CHECK_THROWS_AS(egocentric_from_apparent(Quaternion::identity(), {1.0, 0.0, 0.0}),
                    NonPositiveDepth);
}

TEST_CASE("rotation distance ignores quaternion sign", "[geometry]") {
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const Quaternion q =
            Quaternion{rng.normal(), rng.normal(), rng.normal(), rng.normal()}.normalized();
        const Quaternion neg{-q.w, -q.x, -q.y, -q.z};
        CHECK(rotation_distance(q, neg) == 0.0);
    }
    CHECK(rotation_distance(Quaternion::identity(),
                            Quaternion::from_axis_angle({0, 1, 0}, kPi)) == Catch::Approx(kPi));
    CHECK(rotation_distance(Quaternion::identity(),
                            Quaternion::from_axis_angle({1, 0, 0}, 0.25)) == Catch::Approx(0.25));
}
