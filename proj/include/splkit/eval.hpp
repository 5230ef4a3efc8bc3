#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "splkit/frame.hpp"
#include "splkit/geometry.hpp"
#include "splkit/parallel.hpp"

// Evaluation harness: minimum-cost assignment, top-view rotated-rectangle
// IoU, gated 2D/BEV matching, precision-recall sweeps, and the per-cell
// top-view heatmap.

namespace splkit {

// Cost for pairs that must not be matched. Any assignment avoiding one more
// forbidden pair beats any re-arrangement of allowed ones, as long as the sum
// of allowed costs stays far below this value.
inline constexpr double kForbiddenCost = 1e6;

// Shortest-augmenting-path solver, O(n^2 m). Assigns min(n, m) pairs with
// minimum total cost; pairs are reported sorted by row index. Costs must be
// finite and non-negative.
inline std::vector<std::pair<int, int>> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n_rows = static_cast<int>(cost.size());
    const int n_cols = n_rows == 0 ? 0 : static_cast<int>(cost[0].size());
    if (n_rows == 0 || n_cols == 0) return {};

    const bool transposed = n_rows > n_cols;
    const int n = transposed ? n_cols : n_rows;
    const int m = transposed ? n_rows : n_cols;
    auto at = [&](int r, int c) { return transposed ? cost[c][r] : cost[r][c]; };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> match(m + 1, 0);  // 1-based row matched to column j
    std::vector<int> way(m + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(n);
    for (int j = 1; j <= m; ++j) {
        if (match[j] == 0) continue;
        if (transposed)
            pairs.emplace_back(j - 1, match[j] - 1);
        else
            pairs.emplace_back(match[j] - 1, j - 1);
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

namespace detail {

struct Poly2 {
    std::vector<GroundPoint> pts;
};

inline double shoelace_area(const Poly2& poly) {
    const std::size_t n = poly.pts.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const GroundPoint& a = poly.pts[i];
        const GroundPoint& b = poly.pts[(i + 1) % n];
        acc += a.x * b.z - b.x * a.z;
    }
    return std::abs(acc) / 2.0;
}

// Sutherland-Hodgman clip of a convex subject polygon against one half-plane
// (inside = left of edge a->b for counter-clockwise clip polygons).
inline Poly2 clip_halfplane(const Poly2& subject, const GroundPoint& a, const GroundPoint& b) {
    Poly2 out;
    const std::size_t n = subject.pts.size();
    auto side = [&](const GroundPoint& p) {
        return (b.x - a.x) * (p.z - a.z) - (b.z - a.z) * (p.x - a.x);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const GroundPoint& cur = subject.pts[i];
        const GroundPoint& nxt = subject.pts[(i + 1) % n];
        const double sc = side(cur);
        const double sn = side(nxt);
        if (sc >= 0.0) out.pts.push_back(cur);
        if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
            const double t = sc / (sc - sn);
            out.pts.push_back({cur.x + t * (nxt.x - cur.x), cur.z + t * (nxt.z - cur.z)});
        }
    }
    return out;
}

inline double convex_intersection_area(const Poly2& a, const Poly2& b) {
    Poly2 clipped = a;
    const std::size_t n = b.pts.size();
    for (std::size_t i = 0; i < n && !clipped.pts.empty(); ++i)
        clipped = clip_halfplane(clipped, b.pts[i], b.pts[(i + 1) % n]);
    return shoelace_area(clipped);
}

}  // namespace detail

// Yaw about the vertical axis: heading of the cuboid's local +z in top view.
inline double yaw_of(const Quaternion& q) {
    const Point3 d = rotate(q, {0.0, 0.0, 1.0});
    return std::atan2(d.x, d.z);
}

// Counter-clockwise footprint rectangle on the x-z plane (width x length).
inline detail::Poly2 footprint(const Cuboid3D& c) {
    const double yaw = yaw_of(c.orientation);
    const double cs = std::cos(yaw), sn = std::sin(yaw);
    const double hw = c.dims.width / 2.0, hl = c.dims.length / 2.0;
    auto place = [&](double lx, double lz) -> GroundPoint {
        return {c.center.x + cs * lx + sn * lz, c.center.z - sn * lx + cs * lz};
    };
    detail::Poly2 poly;
    poly.pts = {place(-hw, -hl), place(hw, -hl), place(hw, hl), place(-hw, hl)};
    // ensure counter-clockwise in (x, z)
    double acc = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const GroundPoint& a = poly.pts[i];
        const GroundPoint& b = poly.pts[(i + 1) % 4];
        acc += a.x * b.z - b.x * a.z;
    }
    if (acc < 0.0) std::reverse(poly.pts.begin(), poly.pts.end());
    return poly;
}

inline double bev_iou(const Cuboid3D& a, const Cuboid3D& b) {
    const auto pa = footprint(a);
    const auto pb = footprint(b);
    const double area_a = detail::shoelace_area(pa);
    const double area_b = detail::shoelace_area(pb);
    if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
    const double inter = detail::convex_intersection_area(pa, pb);
    const double uni = area_a + area_b - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

struct MatchResult {
    std::vector<std::pair<int, int>> pairs;  // (gt index, pred index)
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_pred;
};

namespace detail {

template <typename IouFn>
MatchResult match_gated(std::size_t n_gt, std::size_t n_pred, double iou_threshold, IouFn&& iou) {
    std::vector<std::vector<double>> cost(n_gt, std::vector<double>(n_pred, kForbiddenCost));
    std::vector<std::vector<double>> score(n_gt, std::vector<double>(n_pred, 0.0));
    for (std::size_t g = 0; g < n_gt; ++g) {
        for (std::size_t p = 0; p < n_pred; ++p) {
            const double v = iou(g, p);
            score[g][p] = v;
            if (v >= iou_threshold) cost[g][p] = 1.0 - v;
        }
    }
    MatchResult out;
    std::vector<char> gt_used(n_gt, 0), pred_used(n_pred, 0);
    for (const auto& [g, p] : hungarian(cost)) {
        if (score[g][p] < iou_threshold) continue;  // forbidden filler pair
        out.pairs.emplace_back(g, p);
        gt_used[g] = 1;
        pred_used[p] = 1;
    }
    for (std::size_t g = 0; g < n_gt; ++g)
        if (!gt_used[g]) out.unmatched_gt.push_back(static_cast<int>(g));
    for (std::size_t p = 0; p < n_pred; ++p)
        if (!pred_used[p]) out.unmatched_pred.push_back(static_cast<int>(p));
    return out;
}

}  // namespace detail

inline MatchResult match_2d(const std::vector<Box2D>& gts, const std::vector<Box2D>& preds,
                            double iou_threshold = 0.5) {
    return detail::match_gated(gts.size(), preds.size(), iou_threshold,
                               [&](std::size_t g, std::size_t p) { return iou_2d(gts[g], preds[p]); });
}

inline MatchResult match_bev(const std::vector<Cuboid3D>& gts, const std::vector<Cuboid3D>& preds,
                             double iou_threshold = 0.5) {
    return detail::match_gated(gts.size(), preds.size(), iou_threshold,
                               [&](std::size_t g, std::size_t p) { return bev_iou(gts[g], preds[p]); });
}

// One ground-truth or predicted object, as the metrics see it.
struct EvalObject {
    Box2D box2d;
    std::optional<Cuboid3D> cuboid;
    int category = 0;
    double confidence = 1.0;
};

enum class MatchSpace { image, bev };

inline MatchResult match_objects(const std::vector<EvalObject>& gts,
                                 const std::vector<EvalObject>& preds, MatchSpace space,
                                 double iou_threshold = 0.5) {
    if (space == MatchSpace::image) {
        return detail::match_gated(gts.size(), preds.size(), iou_threshold,
                                   [&](std::size_t g, std::size_t p) {
                                       return iou_2d(gts[g].box2d, preds[p].box2d);
                                   });
    }
    return detail::match_gated(gts.size(), preds.size(), iou_threshold,
                               [&](std::size_t g, std::size_t p) {
                                   if (!gts[g].cuboid || !preds[p].cuboid) return 0.0;
                                   return bev_iou(*gts[g].cuboid, *preds[p].cuboid);
                               });
}

struct PRPoint {
    double threshold = 0.0;
    double precision = 1.0;
    double recall = 1.0;
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

struct PRCurve {
    std::vector<PRPoint> points;  // descending threshold
    double auc = 0.0;
    bool degenerate = false;  // no ground truth and no predictions
};

namespace detail {

inline PRPoint count_point(const std::vector<std::vector<EvalObject>>& gts,
                           const std::vector<std::vector<EvalObject>>& preds, MatchSpace space,
                           double iou_threshold, double conf_threshold) {
    PRPoint pt;
    pt.threshold = conf_threshold;
    for (std::size_t f = 0; f < gts.size(); ++f) {
        std::vector<EvalObject> kept;
        for (const EvalObject& p : preds[f])
            if (p.confidence >= conf_threshold) kept.push_back(p);
        const MatchResult m = match_objects(gts[f], kept, space, iou_threshold);
        pt.tp += static_cast<long>(m.pairs.size());
        pt.fn += static_cast<long>(m.unmatched_gt.size());
        pt.fp += static_cast<long>(m.unmatched_pred.size());
    }
    pt.precision = (pt.tp + pt.fp) == 0 ? 1.0 : static_cast<double>(pt.tp) / (pt.tp + pt.fp);
    pt.recall = (pt.tp + pt.fn) == 0 ? 1.0 : static_cast<double>(pt.tp) / (pt.tp + pt.fn);
    return pt;
}

}  // namespace detail

// Threshold sweep over every distinct confidence; AUC is the area under the
// precision-recall step curve, summed as precision * delta-recall while the
// threshold descends.
inline PRCurve pr_curve_and_auc(const std::vector<std::vector<EvalObject>>& gts,
                                const std::vector<std::vector<EvalObject>>& preds, MatchSpace space,
                                double iou_threshold = 0.5, int threads = 1) {
    PRCurve curve;
    std::vector<double> thresholds;
    std::size_t n_gt = 0, n_pred = 0;
    for (const auto& fr : gts) n_gt += fr.size();
    for (const auto& fr : preds) {
        n_pred += fr.size();
        for (const EvalObject& p : fr) thresholds.push_back(p.confidence);
    }
    if (n_gt == 0 && n_pred == 0) {
        curve.degenerate = true;
        curve.auc = 1.0;
        return curve;
    }
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    curve.points.resize(thresholds.size());
    parallel_for(thresholds.size(), threads, [&](std::size_t i) {
        curve.points[i] = detail::count_point(gts, preds, space, iou_threshold, thresholds[i]);
    });
    double prev_recall = 0.0;
    for (const PRPoint& pt : curve.points) {
        curve.auc += pt.precision * (pt.recall - prev_recall);
        prev_recall = pt.recall;
    }
    return curve;
}

// Single-operating-point counts at a fixed confidence threshold.
inline PRPoint metrics_at_threshold(const std::vector<std::vector<EvalObject>>& gts,
                                    const std::vector<std::vector<EvalObject>>& preds,
                                    MatchSpace space, double iou_threshold = 0.5,
                                    double conf_threshold = 0.5) {
    return detail::count_point(gts, preds, space, iou_threshold, conf_threshold);
}

struct HeatmapConfig {
    double cell_lateral = 4.0;        // meters
    double cell_longitudinal = 10.0;  // meters
    double lateral_extent = 20.0;     // +/- meters
    double longitudinal_min = -100.0;
    double longitudinal_max = 200.0;
    double assoc_distance = 10.0;  // meters
};

struct HeatmapCell {
    long tp_recall = 0;     // true positives binned at the ground-truth cell
    long tp_precision = 0;  // true positives binned at the predicted cell
    long fp = 0;
    long fn = 0;
    bool ego = false;

    bool has_precision() const { return tp_precision + fp > 0; }
    bool has_recall() const { return tp_recall + fn > 0; }
    double precision() const { return static_cast<double>(tp_precision) / (tp_precision + fp); }
    double recall() const { return static_cast<double>(tp_recall) / (tp_recall + fn); }
};

struct HeatmapGrid {
    HeatmapConfig config;
    int rows = 0;  // longitudinal cells, row 0 at longitudinal_min
    int cols = 0;  // lateral cells, col 0 at -lateral_extent
    std::vector<HeatmapCell> cells;
    long overflow_tp = 0;
    long overflow_fp = 0;
    long overflow_fn = 0;
    double total_precision = 0.0;  // unweighted mean over cells with defined values
    double total_recall = 0.0;

    const HeatmapCell& cell(int row, int col) const { return cells[row * cols + col]; }
    HeatmapCell& cell(int row, int col) { return cells[row * cols + col]; }
};

namespace detail {

inline bool heatmap_cell_index(const HeatmapConfig& cfg, const GroundPoint& p, int* row, int* col) {
    const double x = p.x + cfg.lateral_extent;
    const double z = p.z - cfg.longitudinal_min;
    if (x < 0.0 || z < 0.0) return false;
    const int c = static_cast<int>(std::floor(x / cfg.cell_lateral));
    const int r = static_cast<int>(std::floor(z / cfg.cell_longitudinal));
    const int n_cols = static_cast<int>(std::round(2.0 * cfg.lateral_extent / cfg.cell_lateral));
    const int n_rows = static_cast<int>(
        std::round((cfg.longitudinal_max - cfg.longitudinal_min) / cfg.cell_longitudinal));
    if (c >= n_cols || r >= n_rows) return false;
    *row = r;
    *col = c;
    return true;
}

}  // namespace detail

// Distance-gated Hungarian association per frame; true positives feed the
// recall map at the ground-truth cell and the precision map at the predicted
// cell, misses and false alarms land where their denominator lives.
inline HeatmapGrid heatmap_eval(const std::vector<std::vector<GroundPoint>>& gts,
                                const std::vector<std::vector<GroundPoint>>& preds,
                                const HeatmapConfig& config = {}, int threads = 1) {
    HeatmapGrid grid;
    grid.config = config;
    grid.cols = static_cast<int>(std::round(2.0 * config.lateral_extent / config.cell_lateral));
    grid.rows = static_cast<int>(
        std::round((config.longitudinal_max - config.longitudinal_min) / config.cell_longitudinal));
    grid.cells.assign(static_cast<std::size_t>(grid.rows) * grid.cols, HeatmapCell{});

    int ego_row = 0, ego_col = 0;
    if (detail::heatmap_cell_index(config, {1e-9, 1e-9}, &ego_row, &ego_col))
        grid.cell(ego_row, ego_col).ego = true;

    auto bin_tp_recall = [&](const GroundPoint& p) {
        int r, c;
        if (detail::heatmap_cell_index(config, p, &r, &c))
            ++grid.cell(r, c).tp_recall;
        else
            ++grid.overflow_tp;
    };
    auto bin_tp_precision = [&](const GroundPoint& p) {
        int r, c;
        if (detail::heatmap_cell_index(config, p, &r, &c)) ++grid.cell(r, c).tp_precision;
    };
    auto bin_fn = [&](const GroundPoint& p) {
        int r, c;
        if (detail::heatmap_cell_index(config, p, &r, &c))
            ++grid.cell(r, c).fn;
        else
            ++grid.overflow_fn;
    };
    auto bin_fp = [&](const GroundPoint& p) {
        int r, c;
        if (detail::heatmap_cell_index(config, p, &r, &c))
            ++grid.cell(r, c).fp;
        else
            ++grid.overflow_fp;
    };

    const std::vector<GroundPoint> no_preds;
    std::vector<MatchResult> matches(gts.size());
    parallel_for(gts.size(), threads, [&](std::size_t f) {
        const auto& gt = gts[f];
        const auto& pred = f < preds.size() ? preds[f] : no_preds;
        matches[f] = detail::match_gated(
            gt.size(), pred.size(), /*iou_threshold=*/0.0, [&](std::size_t g, std::size_t p) {
                const double dx = gt[g].x - pred[p].x;
                const double dz = gt[g].z - pred[p].z;
                const double dist = std::sqrt(dx * dx + dz * dz);
                // reuse the IoU gate by mapping distance into a score
                return dist < config.assoc_distance ? 1.0 - dist / (2.0 * config.assoc_distance)
                                                    : -1.0;
            });
    });
    for (std::size_t f = 0; f < gts.size(); ++f) {
        const auto& gt = gts[f];
        const auto& pred = f < preds.size() ? preds[f] : no_preds;
        const MatchResult& m = matches[f];
        for (const auto& [g, p] : m.pairs) {
            bin_tp_recall(gt[g]);
            bin_tp_precision(pred[p]);
        }
        for (const int g : m.unmatched_gt) bin_fn(gt[g]);
        for (const int p : m.unmatched_pred) bin_fp(pred[p]);
    }

    long n_prec = 0, n_rec = 0;
    double sum_prec = 0.0, sum_rec = 0.0;
    for (const HeatmapCell& c : grid.cells) {
        if (c.has_precision()) {
            sum_prec += c.precision();
            ++n_prec;
        }
        if (c.has_recall()) {
            sum_rec += c.recall();
            ++n_rec;
        }
    }
    grid.total_precision = n_prec == 0 ? 0.0 : sum_prec / n_prec;
    grid.total_recall = n_rec == 0 ? 0.0 : sum_rec / n_rec;
    return grid;
}

}  // namespace splkit
