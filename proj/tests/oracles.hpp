#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "splkit/geometry.hpp"
#include "splkit/rng.hpp"

// Independent reference implementations used only by tests. These stay off
// the library's code paths on purpose: each one recomputes the quantity it
// checks from first principles.

namespace oracle {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Direct quaternion-to-matrix conversion (textbook formula).
inline Mat3 rotation_matrix(const splkit::Quaternion& q_in) {
    const splkit::Quaternion q = q_in.normalized();
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
             {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
             {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

inline splkit::Point3 apply(const Mat3& m, const splkit::Point3& p) {
    return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z};
}

// Exhaustive minimum-cost assignment of min(n, m) pairs by permutation
// enumeration; usable up to about 8x8.
struct Assignment {
    std::vector<std::pair<int, int>> pairs;
    double total = 0.0;
};

inline Assignment brute_force_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
    Assignment best;
    if (n == 0 || m == 0) return best;

    if (n <= m) {
        std::vector<int> cols(m);
        std::iota(cols.begin(), cols.end(), 0);
        best.total = std::numeric_limits<double>::infinity();
        do {
            double total = 0.0;
            for (int r = 0; r < n; ++r) total += cost[r][cols[r]];
            if (total < best.total) {
                best.total = total;
                best.pairs.clear();
                for (int r = 0; r < n; ++r) best.pairs.emplace_back(r, cols[r]);
            }
        } while (std::next_permutation(cols.begin(), cols.end()));
    } else {
        std::vector<int> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        best.total = std::numeric_limits<double>::infinity();
        do {
            double total = 0.0;
            for (int c = 0; c < m; ++c) total += cost[rows[c]][c];
            if (total < best.total) {
                best.total = total;
                best.pairs.clear();
                for (int c = 0; c < m; ++c) best.pairs.emplace_back(rows[c], c);
            }
        } while (std::next_permutation(rows.begin(), rows.end()));
    }
    std::sort(best.pairs.begin(), best.pairs.end());
    return best;
}

// Monte Carlo IoU of two top-view rectangle footprints: sample a bounding
// box of both footprints, classify each sample by point-in-rotated-rect.
struct Footprint {
    double cx, cz, width, length, yaw;
};

inline Footprint footprint_of(const splkit::Cuboid3D& c) {
    const splkit::Point3 d = apply(rotation_matrix(c.orientation), {0.0, 0.0, 1.0});
    return {c.center.x, c.center.z, c.dims.width, c.dims.length, std::atan2(d.x, d.z)};
}

inline bool inside(const Footprint& f, double x, double z) {
    const double dx = x - f.cx;
    const double dz = z - f.cz;
    const double cs = std::cos(f.yaw), sn = std::sin(f.yaw);
    // inverse of the library's top-view rotation convention
    const double lx = cs * dx - sn * dz;
    const double lz = sn * dx + cs * dz;
    return std::abs(lx) <= f.width / 2.0 && std::abs(lz) <= f.length / 2.0;
}

inline double monte_carlo_bev_iou(const splkit::Cuboid3D& a, const splkit::Cuboid3D& b,
                                  long samples, std::uint64_t seed) {
    const Footprint fa = footprint_of(a);
    const Footprint fb = footprint_of(b);
    const double ra = std::hypot(fa.width, fa.length) / 2.0;
    const double rb = std::hypot(fb.width, fb.length) / 2.0;
    const double x0 = std::min(fa.cx - ra, fb.cx - rb), x1 = std::max(fa.cx + ra, fb.cx + rb);
    const double z0 = std::min(fa.cz - ra, fb.cz - rb), z1 = std::max(fa.cz + ra, fb.cz + rb);
    splkit::Rng rng(seed);
    long in_a = 0, in_b = 0, in_both = 0;
    for (long s = 0; s < samples; ++s) {
        const double x = rng.uniform(x0, x1);
        const double z = rng.uniform(z0, z1);
        const bool ia = inside(fa, x, z);
        const bool ib = inside(fb, x, z);
        in_a += ia;
        in_b += ib;
        in_both += ia && ib;
    }
    const long uni = in_a + in_b - in_both;
    return uni == 0 ? 0.0 : static_cast<double>(in_both) / static_cast<double>(uni);
}

}  // namespace oracle
