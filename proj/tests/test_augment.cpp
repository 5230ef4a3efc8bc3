#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "splkit/augment.hpp"
#include "splkit/datagen.hpp"
#include "splkit/rng.hpp"

using namespace splkit;

namespace {
const CameraIntrinsics kCam{1000.0, 1000.0, 960.0, 540.0, 1920, 1080};

Frame small_scene(std::uint64_t seed, bool raster = false) {
    SceneConfig config;
    config.min_objects = 3;
    config.max_objects = 8;
    config.with_raster = raster;
    return generate_scene(config, seed);
}
}  // namespace

TEST_CASE("draw_scale degenerate bounds", "[augment]") {
    Rng rng(1);
    CHECK(draw_scale({1.0, 1.0}, rng) == 1.0);
}

TEST_CASE("draw_scale stays within bounds and is deterministic", "[augment]") {
    const ScaleBounds bounds{0.5, 2.0};
    Rng a(42), b(42);
    CHECK(draw_scale(bounds, a) == draw_scale(bounds, b));
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double s = draw_scale(bounds, rng);
        CHECK(s >= 0.5);
        CHECK(s <= 2.0);
    }
}

TEST_CASE("draw_scale is log-uniform: zoom-in and zoom-out equally likely", "[augment]") {
    const ScaleBounds bounds{0.5, 2.0};
    Rng rng(11);
    int below = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
        if (draw_scale(bounds, rng) < 1.0) ++below;
    CHECK(std::abs(below / static_cast<double>(n) - 0.5) < 0.02);
}

TEST_CASE("transform_pixel identity and fixed point", "[augment]") {
    const Pixel p{123.0, 456.0};
    const Pixel id = transform_pixel({1.0, 0.0, 0.0}, kCam, p);
    CHECK(id.u == p.u);
    CHECK(id.v == p.v);
    const Pixel center = transform_pixel({2.0, 0.0, 0.0}, kCam, {960.0, 540.0});
    CHECK(center.u == 960.0);
    CHECK(center.v == 540.0);
    const Pixel off = transform_pixel({2.0, 0.0, 0.0}, kCam, {970.0, 540.0});
    CHECK(off.u == 980.0);
    CHECK(off.v == 540.0);
}

TEST_CASE("adjust_intrinsics follows the stated formulas", "[augment]") {
    const CameraIntrinsics id = adjust_intrinsics({1.0, 0.0, 0.0}, kCam);
    CHECK(id.fx == kCam.fx);
    CHECK(id.cx == kCam.cx);
    CHECK(id.cy == kCam.cy);

    const CameraIntrinsics zoomed = adjust_intrinsics({2.0, 0.0, 0.0}, kCam);
    CHECK(zoomed.fx == 2000.0);
    CHECK(zoomed.fy == 2000.0);

    CameraIntrinsics k = kCam;
    k.cx = 900.0;
    const CameraIntrinsics shrunk = adjust_intrinsics({0.5, 0.0, 0.0}, k);
    CHECK(shrunk.cx == 930.0);
    CHECK(shrunk.width == k.width);
    CHECK(shrunk.height == k.height);
}

TEST_CASE("projection consistency: adjust-then-project equals project-then-transform",
          "[augment]") {
    Rng rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        CameraIntrinsics k;
        k.width = rng.uniform_int(320, 3840);
        k.height = rng.uniform_int(240, 2160);
        k.fx = rng.uniform(200.0, 3000.0);
        k.fy = rng.uniform(200.0, 3000.0);
        k.cx = rng.uniform(0.3, 0.7) * k.width;
        k.cy = rng.uniform(0.3, 0.7) * k.height;
        const ZoomShiftParams params{rng.uniform(0.5, 2.0), rng.uniform(-200.0, 200.0),
                                     rng.uniform(-200.0, 200.0)};
        const Point3 p{rng.uniform(-50.0, 50.0), rng.uniform(-20.0, 20.0), rng.uniform(0.5, 200.0)};
        const Pixel direct = project(adjust_intrinsics(params, k), p);
        const Pixel via2d = transform_pixel(params, k, project(k, p));
        worst = std::max(worst, std::abs(direct.u - via2d.u));
        worst = std::max(worst, std::abs(direct.v - via2d.v));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("zoom composition multiplies scales", "[augment]") {
    Rng rng(77);
    for (int i = 0; i < 100; ++i) {
        const double s = rng.uniform(0.5, 2.0);
        const double t = rng.uniform(0.5, 2.0);
        const CameraIntrinsics two_step =
            adjust_intrinsics({t, 0.0, 0.0}, adjust_intrinsics({s, 0.0, 0.0}, kCam));
        const CameraIntrinsics one_step = adjust_intrinsics({s * t, 0.0, 0.0}, kCam);
        CHECK(std::abs(two_step.fx - one_step.fx) < 1e-9);
        CHECK(std::abs(two_step.fy - one_step.fy) < 1e-9);
        CHECK(std::abs(two_step.cx - one_step.cx) < 1e-9);
        CHECK(std::abs(two_step.cy - one_step.cy) < 1e-9);
    }
}

TEST_CASE("resample with identity params is bit-identical", "[augment]") {
    const Frame frame = small_scene(5, /*raster=*/true);
    REQUIRE(frame.raster.has_value());
    const Raster out = resample(*frame.raster, {1.0, 0.0, 0.0});
    CHECK(out == *frame.raster);
}

TEST_CASE("zoom-out pads with exact zeros outside the half-size region", "[augment]") {
    const Raster constant = Raster::filled(64, 64, {1.0, 0.5, 0.25});
    const Raster out = resample(constant, {0.5, 0.0, 0.0});
    REQUIRE(out.width == 64);
    REQUIRE(out.height == 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            const bool outside = x < 16 || x > 47 || y < 16 || y > 47;
            if (outside) {
                CHECK(out.at(x, y) == std::array<double, 3>{0.0, 0.0, 0.0});
            }
        }
    }
    // interior of the shrunken image keeps the constant value
    CHECK(out.at(32, 32) == std::array<double, 3>{1.0, 0.5, 0.25});
    CHECK(out.at(20, 40) == std::array<double, 3>{1.0, 0.5, 0.25});
}

TEST_CASE("zoom-in of a constant raster keeps interior intensity", "[augment]") {
    const Raster constant = Raster::filled(32, 32, {0.75, 0.75, 0.75});
    const Raster out = resample(constant, {2.0, 0.0, 0.0});
    for (int y = 4; y < 28; ++y)
        for (int x = 4; x < 28; ++x) {
            CHECK(out.at(x, y)[0] == Catch::Approx(0.75));
        }
}

TEST_CASE("augment_frame with identity params preserves the frame", "[augment]") {
    const Frame frame = small_scene(9, /*raster=*/true);
    const Frame out = augment_frame(frame, {1.0, 0.0, 0.0}, 0.25);
    REQUIRE(out.annotations.size() == frame.annotations.size());
    CHECK(out.intrinsics.fx == frame.intrinsics.fx);
    CHECK(*out.raster == *frame.raster);
    for (std::size_t i = 0; i < out.annotations.size(); ++i) {
        CHECK(out.annotations[i].box2d.center_u == frame.annotations[i].box2d.center_u);
        CHECK(out.annotations[i].box2d.width == frame.annotations[i].box2d.width);
        CHECK(out.annotations[i].category == frame.annotations[i].category);
    }
}

TEST_CASE("augment_frame drops boxes pushed outside the image", "[augment]") {
    Frame frame;
    frame.id = "t";
    frame.intrinsics = kCam;
    Annotation ann;
    ann.category = 0;
    ann.box2d = {100.0, 100.0, 60.0, 40.0};
    ann.is_pseudo = true;
    frame.annotations.push_back(ann);
    // scale 2 about the center moves (100,100) to (-760,-340): fully outside
    const Frame out = augment_frame(frame, {2.0, 0.0, 0.0}, 0.25);
    CHECK(out.annotations.empty());
}

TEST_CASE("kept 3D centers project consistently after augmentation", "[augment]") {
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        const Frame frame = small_scene(100 + t);
        const ZoomShiftParams params{rng.uniform(0.5, 2.0), rng.uniform(-192.0, 192.0),
                                     rng.uniform(-108.0, 108.0)};
        const Frame out = augment_frame(frame, params, 0.25);
        for (const Annotation& ann : out.annotations) {
            REQUIRE(ann.cuboid.has_value());
            const Pixel direct = project(out.intrinsics, ann.cuboid->center);
            const Pixel via2d =
                transform_pixel(params, frame.intrinsics, project(frame.intrinsics, ann.cuboid->center));
            CHECK(std::abs(direct.u - via2d.u) < 1e-9);
            CHECK(std::abs(direct.v - via2d.v) < 1e-9);
        }
    }
}

TEST_CASE("cuboids and their apparent orientation are untouched by augmentation", "[augment]") {
    Rng rng(55);
    for (int t = 0; t < 20; ++t) {
        const Frame frame = small_scene(300 + t);
        const ZoomShiftParams params{rng.uniform(0.5, 2.0), rng.uniform(-100.0, 100.0),
                                     rng.uniform(-50.0, 50.0)};
        // visibility threshold 0 keeps every annotation, preserving order
        const Frame out = augment_frame(frame, params, 0.0);
        REQUIRE(out.annotations.size() == frame.annotations.size());
        for (std::size_t i = 0; i < out.annotations.size(); ++i) {
            const Cuboid3D& before = *frame.annotations[i].cuboid;
            const Cuboid3D& after = *out.annotations[i].cuboid;
            CHECK(norm(before.center - after.center) == 0.0);
            const Quaternion app_before = apparent_from_egocentric(before.orientation, before.center);
            const Quaternion app_after = apparent_from_egocentric(after.orientation, after.center);
            CHECK(rotation_distance(app_before, app_after) < 1e-9);
        }
    }
}

TEST_CASE("kept-annotation count is non-increasing in the visibility threshold", "[augment]") {
    const Frame frame = small_scene(404);
    const ZoomShiftParams params{0.6, 350.0, 180.0};
    std::size_t prev = frame.annotations.size() + 1;
    for (const double threshold : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        const std::size_t kept = augment_frame(frame, params, threshold).annotations.size();
        CHECK(kept <= prev);
        prev = kept;
    }
}

TEST_CASE("resample output always matches input dimensions", "[augment]") {
    Rng rng(62);
    for (int t = 0; t < 10; ++t) {
        const Raster r = Raster::filled(rng.uniform_int(8, 64), rng.uniform_int(8, 64), {0.5, 0.5, 0.5});
        const ZoomShiftParams params{rng.uniform(0.5, 2.0), rng.uniform(-20.0, 20.0),
                                     rng.uniform(-20.0, 20.0)};
        const Raster out = resample(r, params);
        CHECK(out.width == r.width);
        CHECK(out.height == r.height);
    }
}
