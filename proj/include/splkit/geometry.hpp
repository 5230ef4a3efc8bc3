#pragma once

#include <array>
#include <cmath>
#include <string>

#include "splkit/error.hpp"

// Pinhole camera math in a fixed frame: x right, y down, z forward (meters).
// Pixels follow the usual (u right, v down) convention. Quaternions are
// Hamilton (w, x, y, z); q and -q denote the same rotation, so comparisons go
// through rotation_distance rather than component equality.

namespace splkit {

struct Pixel {
    double u = 0.0;
    double v = 0.0;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Point3& a, const Point3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Point3 cross(const Point3& a, const Point3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

struct Dimensions3 {
    double width = 0.0;   // x extent, meters
    double height = 0.0;  // y extent, meters
    double length = 0.0;  // z extent, meters
};

struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Quaternion conjugate() const { return {w, -x, -y, -z}; }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quaternion normalized() const {
        const double n = norm();
        if (n < 1e-12) throw Error("cannot normalize near-zero quaternion");
        return {w / n, x / n, y / n, z / n};
    }

    // Hamilton product; (a * b) applies b first, then a.
    Quaternion operator*(const Quaternion& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    static Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }

    static Quaternion from_axis_angle(const Point3& axis, double angle_rad) {
        const double n = splkit::norm(axis);
        if (n < 1e-12) throw Error("axis must be non-zero");
        const double s = std::sin(angle_rad / 2.0) / n;
        return {std::cos(angle_rad / 2.0), axis.x * s, axis.y * s, axis.z * s};
    }
};

// Rotation angle between two orientations, radians in [0, pi]. Uses the
// chord length ||qa -+ qb|| = 2 sin(theta/4), which stays accurate for tiny
// angles where the dot-product/acos route collapses to sqrt(eps) noise.
inline double rotation_distance(const Quaternion& a, const Quaternion& b) {
    const Quaternion qa = a.normalized();
    const Quaternion qb = b.normalized();
    auto chord = [](const Quaternion& p, const Quaternion& q, double sign) {
        const double dw = p.w - sign * q.w;
        const double dx = p.x - sign * q.x;
        const double dy = p.y - sign * q.y;
        const double dz = p.z - sign * q.z;
        return std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
    };
    const double d = std::min(chord(qa, qb, 1.0), chord(qa, qb, -1.0));
    return 4.0 * std::asin(std::min(1.0, d / 2.0));
}

struct Cuboid3D {
    Point3 center;
    Dimensions3 dims;
    Quaternion orientation;  // egocentric, camera frame
};

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;
};

inline Pixel project(const CameraIntrinsics& k, const Point3& p) {
    if (p.z <= 0.0)
        throw NonPositiveDepth("project: z = " + std::to_string(p.z));
    return {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy};
}

inline Point3 backproject(const CameraIntrinsics& k, const Pixel& px, double depth) {
    if (depth <= 0.0)
        throw NonPositiveDepth("backproject: depth = " + std::to_string(depth));
    return {(px.u - k.cx) * depth / k.fx, (px.v - k.cy) * depth / k.fy, depth};
}

inline Point3 rotate(const Quaternion& q, const Point3& p) {
    const Quaternion u = q.normalized();
    const Point3 v{u.x, u.y, u.z};
    const Point3 t = cross(v, p) * 2.0;
    return p + t * u.w + cross(v, t);
}

// Corner i carries local signs (sx, sy, sz) with sx = +1 iff bit 0 of i is
// set, sy from bit 1, sz from bit 2; cleared bits give -1. The loss module
// relies on this enumeration for corner correspondence.
inline std::array<Point3, 8> cuboid_corners(const Cuboid3D& c) {
    std::array<Point3, 8> out;
    const double hw = c.dims.width / 2.0;
    const double hh = c.dims.height / 2.0;
    const double hl = c.dims.length / 2.0;
    for (int i = 0; i < 8; ++i) {
        const Point3 local{(i & 1) ? hw : -hw, (i & 2) ? hh : -hh, (i & 4) ? hl : -hl};
        out[i] = c.center + rotate(c.orientation, local);
    }
    return out;
}

namespace detail {

// Minimal geodesic rotation taking +z onto the direction of `center`.
// Never degenerate for z > 0 (the anti-parallel case needs z < 0).
inline Quaternion ray_rotation(const Point3& center) {
    if (center.z <= 0.0)
        throw NonPositiveDepth("ray_rotation: center.z = " + std::to_string(center.z));
    const double n = norm(center);
    const Point3 d{center.x / n, center.y / n, center.z / n};
    const Quaternion q{1.0 + d.z, -d.y, d.x, 0.0};
    return q.normalized();
}

}  // namespace detail

inline Quaternion apparent_from_egocentric(const Quaternion& q_ego, const Point3& center) {
    return (detail::ray_rotation(center).conjugate() * q_ego).normalized();
}

inline Quaternion egocentric_from_apparent(const Quaternion& q_app, const Point3& center) {
    return (detail::ray_rotation(center) * q_app).normalized();
}

}  // namespace splkit
