#pragma once

#include <algorithm>
#include <cmath>

#include "splkit/frame.hpp"
#include "splkit/geometry.hpp"
#include "splkit/rng.hpp"

// Zoom/shift augmentation with a virtual camera. The 2D transform scales
// about the image center and then shifts; adjust_intrinsics applies the same
// affine map to the camera so that for any 3D point X with z > 0:
//
//   project(adjust_intrinsics(params, k), X)
//     == transform_pixel(params, k, project(k, X))
//
// 3D annotations therefore stay valid untouched, and the apparent
// orientation (the regression target) is unchanged by construction.

namespace splkit {

struct ScaleBounds {
    double lower = 0.5;
    double upper = 2.0;
};

struct ZoomShiftParams {
    double scale = 1.0;
    double shift_u = 0.0;  // pixels
    double shift_v = 0.0;  // pixels
};

// Log-uniform over [lower, upper]: zoom-in by s and zoom-out by 1/s are
// equally likely for symmetric bounds like (0.5, 2.0).
inline double draw_scale(const ScaleBounds& bounds, Rng& rng) {
    return rng.log_uniform(bounds.lower, bounds.upper);
}

inline Pixel transform_pixel(const ZoomShiftParams& params, const CameraIntrinsics& k,
                             const Pixel& p) {
    const double cu = k.width / 2.0;
    const double cv = k.height / 2.0;
    return {params.scale * (p.u - cu) + cu + params.shift_u,
            params.scale * (p.v - cv) + cv + params.shift_v};
}

inline CameraIntrinsics adjust_intrinsics(const ZoomShiftParams& params,
                                          const CameraIntrinsics& k) {
    const double cu = k.width / 2.0;
    const double cv = k.height / 2.0;
    CameraIntrinsics out = k;
    out.fx = params.scale * k.fx;
    out.fy = params.scale * k.fy;
    out.cx = params.scale * (k.cx - cu) + cu + params.shift_u;
    out.cy = params.scale * (k.cy - cv) + cv + params.shift_v;
    return out;
}

// Output keeps the input size; sources outside the input are zero (black).
inline Raster resample(const Raster& raster, const ZoomShiftParams& params) {
    Raster out;
    out.width = raster.width;
    out.height = raster.height;
    out.values.assign(raster.values.size(), {0.0, 0.0, 0.0});
    const double cu = raster.width / 2.0;
    const double cv = raster.height / 2.0;

    auto fetch = [&](int x, int y) -> std::array<double, 3> {
        if (x < 0 || y < 0 || x >= raster.width || y >= raster.height)
            return {0.0, 0.0, 0.0};
        return raster.at(x, y);
    };

    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const double sx = (x - cu - params.shift_u) / params.scale + cu;
            const double sy = (y - cv - params.shift_v) / params.scale + cv;
            const double x0f = std::floor(sx);
            const double y0f = std::floor(sy);
            const int x0 = static_cast<int>(x0f);
            const int y0 = static_cast<int>(y0f);
            const double ax = sx - x0f;
            const double ay = sy - y0f;
            const auto p00 = fetch(x0, y0);
            const auto p10 = fetch(x0 + 1, y0);
            const auto p01 = fetch(x0, y0 + 1);
            const auto p11 = fetch(x0 + 1, y0 + 1);
            auto& dst = out.at(x, y);
            for (int c = 0; c < 3; ++c) {
                const double top = p00[c] * (1.0 - ax) + p10[c] * ax;
                const double bot = p01[c] * (1.0 - ax) + p11[c] * ax;
                dst[c] = top * (1.0 - ay) + bot * ay;
            }
        }
    }
    return out;
}

// Fraction of the box area that lies inside the image rectangle.
// Zero-area boxes count as visible iff their center is inside.
inline double visible_fraction(const Box2D& box, int width, int height) {
    const double area = box.width * box.height;
    if (area <= 0.0) {
        const bool inside = box.center_u >= 0.0 && box.center_u <= width &&
                            box.center_v >= 0.0 && box.center_v <= height;
        return inside ? 1.0 : 0.0;
    }
    const double x0 = std::max(box.center_u - box.width / 2.0, 0.0);
    const double x1 = std::min(box.center_u + box.width / 2.0, static_cast<double>(width));
    const double y0 = std::max(box.center_v - box.height / 2.0, 0.0);
    const double y1 = std::min(box.center_v + box.height / 2.0, static_cast<double>(height));
    const double inter = std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0);
    return inter / area;
}

// Raster, intrinsics and 2D boxes follow the zoom/shift; cuboids are copied
// unchanged. Annotations whose transformed box keeps less than
// visibility_threshold of its area inside the image are dropped.
inline Frame augment_frame(const Frame& frame, const ZoomShiftParams& params,
                           double visibility_threshold = 0.25) {
    Frame out;
    out.id = frame.id;
    out.facing = frame.facing;
    out.intrinsics = adjust_intrinsics(params, frame.intrinsics);
    if (frame.raster) out.raster = resample(*frame.raster, params);
    out.annotations.reserve(frame.annotations.size());
    for (const Annotation& ann : frame.annotations) {
        Annotation moved = ann;
        const Pixel c = transform_pixel(params, frame.intrinsics,
                                        {ann.box2d.center_u, ann.box2d.center_v});
        moved.box2d.center_u = c.u;
        moved.box2d.center_v = c.v;
        moved.box2d.width = ann.box2d.width * params.scale;
        moved.box2d.height = ann.box2d.height * params.scale;
        if (visible_fraction(moved.box2d, frame.intrinsics.width, frame.intrinsics.height) <
            visibility_threshold)
            continue;
        out.annotations.push_back(moved);
    }
    return out;
}

}  // namespace splkit
