#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "splkit/frame.hpp"
#include "splkit/geometry.hpp"

// Semi-pseudo-label fusion: merge 2D detections into 3D-annotated frames.
// A detection survives only if its IoU against every projected ground-truth
// cuboid box and every existing 2D box stays below the threshold; survivors
// become cuboid-less annotations with is_pseudo = true. Originals are never
// touched, so the output label set is exactly originals + converted
// detections.

namespace splkit {

inline double iou_2d(const Box2D& a, const Box2D& b) {
    const double ax0 = a.center_u - a.width / 2.0, ax1 = a.center_u + a.width / 2.0;
    const double ay0 = a.center_v - a.height / 2.0, ay1 = a.center_v + a.height / 2.0;
    const double bx0 = b.center_u - b.width / 2.0, bx1 = b.center_u + b.width / 2.0;
    const double by0 = b.center_v - b.height / 2.0, by1 = b.center_v + b.height / 2.0;
    const double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
    const double ih = std::min(ay1, by1) - std::max(ay0, by0);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.width * a.height + b.width * b.height - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

// Axis-aligned bound of the eight projected corners.
inline Box2D project_cuboid_to_box2d(const CameraIntrinsics& k, const Cuboid3D& c) {
    const auto corners = cuboid_corners(c);
    for (const Point3& p : corners)
        if (p.z <= 0.0)
            throw CornerBehindCamera("cuboid corner at z = " + std::to_string(p.z));
    double u0 = 0, u1 = 0, v0 = 0, v1 = 0;
    bool first = true;
    for (const Point3& p : corners) {
        const Pixel px = project(k, p);
        if (first) {
            u0 = u1 = px.u;
            v0 = v1 = px.v;
            first = false;
        } else {
            u0 = std::min(u0, px.u);
            u1 = std::max(u1, px.u);
            v0 = std::min(v0, px.v);
            v1 = std::max(v1, px.v);
        }
    }
    return {(u0 + u1) / 2.0, (v0 + v1) / 2.0, u1 - u0, v1 - v0};
}

// simple-model class index -> complex-dataset category id
using CategoryMap = std::map<int, int>;

inline CategoryMap identity_category_map(int n_categories) {
    CategoryMap m;
    for (int i = 0; i < n_categories; ++i) m[i] = i;
    return m;
}

struct FuseStats {
    long added = 0;
    long filtered = 0;
};

inline double detection_confidence(const Detection2D& det) {
    return det.objectness * det.max_class_prob();
}

inline Frame fuse_frame(const Frame& frame, const std::vector<Detection2D>& detections,
                        double iou_threshold, const CategoryMap& class_map,
                        FuseStats* stats = nullptr) {
    Frame out = frame;

    std::vector<Box2D> existing;
    existing.reserve(frame.annotations.size() * 2);
    for (const Annotation& ann : frame.annotations) {
        existing.push_back(ann.box2d);
        if (ann.cuboid)
            existing.push_back(project_cuboid_to_box2d(frame.intrinsics, *ann.cuboid));
    }

    // Process in a canonical order so the result does not depend on the
    // input ordering of the detections.
    std::vector<std::size_t> order(detections.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ca = detection_confidence(detections[a]);
        const double cb = detection_confidence(detections[b]);
        if (ca != cb) return ca > cb;
        const Box2D& ba = detections[a].box;
        const Box2D& bb = detections[b].box;
        if (ba.center_u != bb.center_u) return ba.center_u < bb.center_u;
        if (ba.center_v != bb.center_v) return ba.center_v < bb.center_v;
        if (ba.width != bb.width) return ba.width < bb.width;
        return ba.height < bb.height;
    });

    for (std::size_t idx : order) {
        const Detection2D& det = detections[idx];
        const auto mapped = class_map.find(det.argmax_class());
        if (mapped == class_map.end())
            throw UnmappedCategory("no mapping for simple-model class " +
                                   std::to_string(det.argmax_class()));
        double max_iou = 0.0;
        for (const Box2D& box : existing)
            max_iou = std::max(max_iou, iou_2d(det.box, box));
        if (max_iou >= iou_threshold) {
            if (stats) ++stats->filtered;
            continue;
        }
        Annotation ann;
        ann.category = mapped->second;
        ann.box2d = det.box;
        ann.cuboid.reset();
        ann.confidence = detection_confidence(det);
        ann.is_pseudo = true;
        out.annotations.push_back(ann);
        existing.push_back(det.box);  // added pseudo boxes dedup later duplicates
        if (stats) ++stats->added;
    }
    return out;
}

inline FuseStats fuse_dataset(std::vector<Frame>& frames,
                              const std::map<std::string, std::vector<Detection2D>>& detections,
                              double iou_threshold, const CategoryMap& class_map) {
    FuseStats total;
    for (Frame& frame : frames) {
        const auto it = detections.find(frame.id);
        if (it == detections.end()) continue;
        FuseStats per_frame;
        frame = fuse_frame(frame, it->second, iou_threshold, class_map, &per_frame);
        total.added += per_frame.added;
        total.filtered += per_frame.filtered;
    }
    return total;
}

}  // namespace splkit
