#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "splkit/geometry.hpp"

namespace splkit {

// Row-major RGB grid, intensities in [0, 1].
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::array<double, 3>> values;

    static Raster filled(int w, int h, const std::array<double, 3>& v) {
        Raster r;
        r.width = w;
        r.height = h;
        r.values.assign(static_cast<std::size_t>(w) * h, v);
        return r;
    }

    const std::array<double, 3>& at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    std::array<double, 3>& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }

    bool operator==(const Raster& o) const {
        return width == o.width && height == o.height && values == o.values;
    }
};

// Center/size parameterization, pixels.
struct Box2D {
    double center_u = 0.0;
    double center_v = 0.0;
    double width = 0.0;
    double height = 0.0;
};

struct Detection2D {
    Box2D box;
    double objectness = 0.0;
    std::vector<double> class_probs;

    int argmax_class() const {
        int best = 0;
        for (std::size_t i = 1; i < class_probs.size(); ++i)
            if (class_probs[i] > class_probs[best]) best = static_cast<int>(i);
        return best;
    }

    double max_class_prob() const {
        return class_probs.empty() ? 0.0 : class_probs[argmax_class()];
    }
};

// is_pseudo annotations carry no cuboid; full ground truth always does.
struct Annotation {
    int category = 0;
    Box2D box2d;
    std::optional<Cuboid3D> cuboid;
    double confidence = 1.0;
    bool is_pseudo = false;
};

// Mounting direction of the camera that produced a frame; used to place
// detections in ego top-view coordinates for the heatmap.
enum class Facing { forward, backward };

struct Frame {
    std::string id;
    CameraIntrinsics intrinsics;
    Facing facing = Facing::forward;
    std::optional<Raster> raster;
    std::vector<Annotation> annotations;
};

// Top-view ego coordinates: x lateral (right), z longitudinal (forward).
struct GroundPoint {
    double x = 0.0;
    double z = 0.0;
};

inline GroundPoint ego_position(const Cuboid3D& c, Facing facing) {
    if (facing == Facing::forward) return {c.center.x, c.center.z};
    return {-c.center.x, -c.center.z};
}

}  // namespace splkit
