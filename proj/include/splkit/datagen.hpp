#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "splkit/frame.hpp"
#include "splkit/geometry.hpp"
#include "splkit/rng.hpp"
#include "splkit/spl.hpp"

// Synthetic scenes that emulate range-limited annotation: full ground truth
// out to z_max, a configurable annotation cutoff, a 2D detector oracle that
// sees everything image-visible, and a noisy 3D predictor whose longitudinal
// error grows with distance.

namespace splkit {

struct CategorySpec {
    int id = 0;
    std::string name;
    Dimensions3 prior;
    double weight = 1.0;
    double dim_jitter = 0.08;  // lognormal sigma on each dimension
};

inline std::vector<CategorySpec> default_categories() {
    return {
        {0, "car", {1.9, 1.6, 4.5}, 0.70, 0.08},
        {1, "van", {2.1, 2.2, 5.5}, 0.15, 0.08},
        {2, "truck", {2.6, 3.5, 12.0}, 0.10, 0.10},
        {3, "motorcycle", {0.9, 1.4, 2.2}, 0.05, 0.10},
    };
}

struct SceneConfig {
    CameraIntrinsics intrinsics{1000.0, 1000.0, 960.0, 540.0, 1920, 1080};
    int min_objects = 4;
    int max_objects = 12;
    double z_min = 5.0;
    double z_max = 200.0;
    double lateral_limit = 20.0;  // +/- meters
    double camera_height = 1.5;   // meters above ground plane
    std::vector<CategorySpec> categories = default_categories();
    double yaw_limit = 3.141592653589793;  // yaw drawn uniform in [-limit, limit]
    // Placement keeps generated objects pairwise separable: top-view circles
    // disjoint by footprint_margin and projected boxes below max_pair_iou2d,
    // so a detection of one object can never deduplicate another.
    double max_pair_iou2d = 0.3;
    double footprint_margin = 0.5;
    int max_placement_attempts = 200;
    double backward_fraction = 0.0;  // fraction of frames from the rear camera
    bool with_raster = false;
    int raster_width = 192;
    int raster_height = 108;
};

namespace detail {

inline double circumradius_topview(const Dimensions3& d) {
    return std::sqrt(d.width * d.width + d.length * d.length) / 2.0;
}

inline int pick_category(const std::vector<CategorySpec>& cats, Rng& rng) {
    double total = 0.0;
    for (const CategorySpec& c : cats) total += c.weight;
    const double r = rng.uniform(0.0, total);
    double acc = 0.0;
    for (std::size_t i = 0; i < cats.size(); ++i) {
        acc += cats[i].weight;
        if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(cats.size()) - 1;
}

inline std::array<double, 3> category_shade(int category) {
    static const std::array<std::array<int, 3>, 8> palette{{{200, 60, 60},
                                                            {60, 120, 200},
                                                            {60, 180, 90},
                                                            {220, 180, 60},
                                                            {160, 90, 200},
                                                            {90, 200, 200},
                                                            {220, 120, 60},
                                                            {150, 150, 150}}};
    const auto& c = palette[static_cast<std::size_t>(category) % palette.size()];
    return {c[0] / 255.0, c[1] / 255.0, c[2] / 255.0};
}

// Flat-shaded box silhouettes over a sky/ground split; all values are exact
// 8-bit levels so pixmap round trips are lossless.
inline Raster render_raster(const SceneConfig& config, const std::vector<Annotation>& annotations) {
    const int w = config.raster_width;
    const int h = config.raster_height;
    Raster raster = Raster::filled(w, h, {135.0 / 255.0, 170.0 / 255.0, 210.0 / 255.0});
    const double sx = static_cast<double>(w) / config.intrinsics.width;
    const double sy = static_cast<double>(h) / config.intrinsics.height;
    const int horizon = std::clamp(static_cast<int>(config.intrinsics.cy * sy), 0, h);
    for (int y = horizon; y < h; ++y)
        for (int x = 0; x < w; ++x) raster.at(x, y) = {90.0 / 255.0, 90.0 / 255.0, 90.0 / 255.0};

    std::vector<const Annotation*> sorted;
    for (const Annotation& a : annotations)
        if (a.cuboid) sorted.push_back(&a);
    std::sort(sorted.begin(), sorted.end(), [](const Annotation* a, const Annotation* b) {
        return a->cuboid->center.z > b->cuboid->center.z;  // paint far to near
    });
    for (const Annotation* a : sorted) {
        const Box2D& b = a->box2d;
        const int x0 = std::max(0, static_cast<int>(std::floor((b.center_u - b.width / 2) * sx)));
        const int x1 = std::min(w, static_cast<int>(std::ceil((b.center_u + b.width / 2) * sx)));
        const int y0 = std::max(0, static_cast<int>(std::floor((b.center_v - b.height / 2) * sy)));
        const int y1 = std::min(h, static_cast<int>(std::ceil((b.center_v + b.height / 2) * sy)));
        const auto shade = category_shade(a->category);
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) raster.at(x, y) = shade;
    }
    return raster;
}

}  // namespace detail

inline Frame generate_scene(const SceneConfig& config, std::uint64_t seed,
                            std::uint64_t frame_index = 0) {
    Rng rng = Rng::stream(seed, frame_index, /*tag=*/1);
    Frame frame;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "f%06llu", static_cast<unsigned long long>(frame_index));
    frame.id = idbuf;
    frame.intrinsics = config.intrinsics;
    frame.facing = rng.uniform01() < config.backward_fraction ? Facing::backward : Facing::forward;

    const int count = rng.uniform_int(config.min_objects, config.max_objects);
    std::vector<Cuboid3D> placed;
    for (int i = 0; i < count; ++i) {
        bool ok = false;
        for (int attempt = 0; attempt < config.max_placement_attempts && !ok; ++attempt) {
            const int cat_index = detail::pick_category(config.categories, rng);
            const CategorySpec& spec = config.categories[cat_index];
            Cuboid3D c;
            c.dims.width = spec.prior.width * std::exp(rng.normal(0.0, spec.dim_jitter));
            c.dims.height = spec.prior.height * std::exp(rng.normal(0.0, spec.dim_jitter));
            c.dims.length = spec.prior.length * std::exp(rng.normal(0.0, spec.dim_jitter));
            c.center.z = rng.uniform(config.z_min, config.z_max);
            c.center.x = rng.uniform(-config.lateral_limit, config.lateral_limit);
            c.center.y = config.camera_height - c.dims.height / 2.0;
            c.orientation =
                Quaternion::from_axis_angle({0, 1, 0}, rng.uniform(-config.yaw_limit, config.yaw_limit));

            const auto corners = cuboid_corners(c);
            bool behind = false;
            for (const Point3& p : corners) behind |= p.z <= 0.0;
            if (behind) continue;

            const Box2D box = project_cuboid_to_box2d(config.intrinsics, c);
            if (box.center_u < 0 || box.center_u > config.intrinsics.width || box.center_v < 0 ||
                box.center_v > config.intrinsics.height)
                continue;

            bool collides = false;
            for (const Cuboid3D& other : placed) {
                const double dx = c.center.x - other.center.x;
                const double dz = c.center.z - other.center.z;
                const double min_sep = detail::circumradius_topview(c.dims) +
                                       detail::circumradius_topview(other.dims) +
                                       config.footprint_margin;
                if (dx * dx + dz * dz < min_sep * min_sep) {
                    collides = true;
                    break;
                }
                const Box2D other_box = project_cuboid_to_box2d(config.intrinsics, other);
                if (iou_2d(box, other_box) > config.max_pair_iou2d) {
                    collides = true;
                    break;
                }
            }
            if (collides) continue;

            placed.push_back(c);
            Annotation ann;
            ann.category = config.categories[cat_index].id;
            ann.box2d = box;
            ann.cuboid = c;
            ann.confidence = 1.0;
            ann.is_pseudo = false;
            frame.annotations.push_back(ann);
            ok = true;
        }
        if (!ok)
            throw PlacementExhausted("could not place object " + std::to_string(i) + " of " +
                                     std::to_string(count) + " after " +
                                     std::to_string(config.max_placement_attempts) + " attempts");
    }

    if (config.with_raster) frame.raster = detail::render_raster(config, frame.annotations);
    return frame;
}

// Emulates the sensor-range limit of the labeling rig: 3D ground truth above
// max_range disappears entirely. Idempotent.
inline Frame apply_annotation_cutoff(const Frame& frame, double max_range) {
    Frame out = frame;
    out.annotations.clear();
    for (const Annotation& ann : frame.annotations) {
        if (ann.cuboid && ann.cuboid->center.z > max_range) continue;
        out.annotations.push_back(ann);
    }
    return out;
}

struct ErrorModel {
    double box_noise_px = 0.0;  // std on 2D box center and size
    // (distance, dropout probability) knots, linearly interpolated
    std::vector<std::pair<double, double>> dropout_knots;
    double longitudinal_coeff = 0.0;  // 3D noise std = coeff * z
    double lateral_std = 0.0;         // meters
    double yaw_noise_deg = 0.0;
    double confidence_noise = 0.0;  // pulls scores below 1

    double dropout_at(double z) const {
        if (dropout_knots.empty()) return 0.0;
        if (z <= dropout_knots.front().first) return dropout_knots.front().second;
        if (z >= dropout_knots.back().first) return dropout_knots.back().second;
        for (std::size_t i = 1; i < dropout_knots.size(); ++i) {
            if (z > dropout_knots[i].first) continue;
            const auto& [z0, p0] = dropout_knots[i - 1];
            const auto& [z1, p1] = dropout_knots[i];
            const double t = (z - z0) / (z1 - z0);
            return p0 + t * (p1 - p0);
        }
        return dropout_knots.back().second;
    }
};

namespace detail {

inline std::uint64_t hash_id(const std::string& id) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (const char ch : id) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    return h;
}

inline double clamp_score(double v) { return std::clamp(v, 0.05, 1.0); }

}  // namespace detail

// Stand-in for a pretrained 2D detector: every image-visible object yields
// its projected box (plus optional pixel noise) unless dropped out.
inline std::vector<Detection2D> oracle_detector_2d(const Frame& frame, const ErrorModel& error,
                                                   std::uint64_t seed, int n_categories = 0) {
    if (n_categories <= 0)
        for (const Annotation& a : frame.annotations)
            n_categories = std::max(n_categories, a.category + 1);
    n_categories = std::max(n_categories, 1);

    Rng rng = Rng::stream(seed, detail::hash_id(frame.id), /*tag=*/2);
    std::vector<Detection2D> out;
    for (const Annotation& ann : frame.annotations) {
        if (!ann.cuboid) continue;
        const auto corners = cuboid_corners(*ann.cuboid);
        bool visible = true;
        for (const Point3& p : corners) visible &= p.z > 0.0;
        if (!visible) continue;
        const Box2D box = project_cuboid_to_box2d(frame.intrinsics, *ann.cuboid);
        if (box.center_u < 0 || box.center_u > frame.intrinsics.width || box.center_v < 0 ||
            box.center_v > frame.intrinsics.height)
            continue;
        if (rng.uniform01() < error.dropout_at(ann.cuboid->center.z)) continue;

        Detection2D det;
        det.box = box;
        if (error.box_noise_px > 0.0) {
            det.box.center_u += rng.normal(0.0, error.box_noise_px);
            det.box.center_v += rng.normal(0.0, error.box_noise_px);
            det.box.width = std::max(1e-3, det.box.width + rng.normal(0.0, error.box_noise_px));
            det.box.height = std::max(1e-3, det.box.height + rng.normal(0.0, error.box_noise_px));
        }
        det.objectness = detail::clamp_score(1.0 - std::abs(rng.normal(0.0, error.confidence_noise)));
        det.class_probs.assign(n_categories, 0.0);
        for (int c = 0; c < n_categories; ++c) {
            if (c == ann.category)
                det.class_probs[c] = detail::clamp_score(1.0 - std::abs(rng.normal(0.0, error.confidence_noise)));
            else if (error.confidence_noise > 0.0)
                det.class_probs[c] = std::clamp(std::abs(rng.normal(0.0, error.confidence_noise)), 0.0, 0.45);
        }
        out.push_back(det);
    }
    return out;
}

// Noisy 3D predictions over full ground truth, reproducing the
// distance-scaled longitudinal error regime.
inline std::vector<Annotation> noisy_predictor_3d(const Frame& frame, const ErrorModel& error,
                                                  std::uint64_t seed) {
    Rng rng = Rng::stream(seed, detail::hash_id(frame.id), /*tag=*/3);
    std::vector<Annotation> out;
    for (const Annotation& ann : frame.annotations) {
        if (!ann.cuboid) continue;
        if (rng.uniform01() < error.dropout_at(ann.cuboid->center.z)) continue;

        Cuboid3D c = *ann.cuboid;
        c.center.z += rng.normal(0.0, error.longitudinal_coeff * ann.cuboid->center.z);
        c.center.x += rng.normal(0.0, error.lateral_std);
        // keep every corner in front of the camera
        const double min_z = detail::circumradius_topview(c.dims) + 0.1;
        c.center.z = std::max(c.center.z, min_z);
        if (error.yaw_noise_deg > 0.0) {
            const double noise = rng.normal(0.0, error.yaw_noise_deg * 3.141592653589793 / 180.0);
            c.orientation = (Quaternion::from_axis_angle({0, 1, 0}, noise) * c.orientation).normalized();
        }

        Annotation pred;
        pred.category = ann.category;
        pred.cuboid = c;
        pred.box2d = project_cuboid_to_box2d(frame.intrinsics, c);
        pred.confidence = detail::clamp_score(1.0 - std::abs(rng.normal(0.0, error.confidence_noise)));
        pred.is_pseudo = false;
        out.push_back(pred);
    }
    return out;
}

}  // namespace splkit
