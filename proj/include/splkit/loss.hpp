#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "splkit/frame.hpp"
#include "splkit/geometry.hpp"

// Masked multitask 2D+3D loss as pure math. 3D targets are encoded as
// (projected center, depth, log-residual dimensions against category priors,
// apparent orientation); the 3D loss is a corner loss disentangled per
// parameter group, and pseudo-labeled targets mask the 3D term entirely.

namespace splkit {

struct PredictionEncoding {
    Box2D box2d;
    double objectness = 0.0;
    std::vector<double> class_probs;
    Pixel center_proj;
    double depth = 0.0;
    std::array<double, 3> dim_residuals{0.0, 0.0, 0.0};  // (dw, dh, dl), log space
    Quaternion orientation_apparent;
};

struct CategoryPriors {
    std::map<int, Dimensions3> mean_dims;

    const Dimensions3& at(int category) const {
        const auto it = mean_dims.find(category);
        if (it == mean_dims.end())
            throw UnknownCategory("no dimension prior for category " + std::to_string(category));
        return it->second;
    }
};

inline Cuboid3D decode_cuboid(const PredictionEncoding& pred, const CameraIntrinsics& k,
                              const CategoryPriors& priors, int category) {
    const Dimensions3& prior = priors.at(category);
    Cuboid3D out;
    out.center = backproject(k, pred.center_proj, pred.depth);
    out.dims.width = prior.width * std::exp(pred.dim_residuals[0]);
    out.dims.height = prior.height * std::exp(pred.dim_residuals[1]);
    out.dims.length = prior.length * std::exp(pred.dim_residuals[2]);
    out.orientation = egocentric_from_apparent(pred.orientation_apparent.normalized(), out.center);
    return out;
}

// Inverse of decode_cuboid for the 3D fields; 2D fields are left default.
inline PredictionEncoding encode_cuboid(const Cuboid3D& c, const CameraIntrinsics& k,
                                        const CategoryPriors& priors, int category) {
    const Dimensions3& prior = priors.at(category);
    PredictionEncoding enc;
    enc.center_proj = project(k, c.center);
    enc.depth = c.center.z;
    enc.dim_residuals = {std::log(c.dims.width / prior.width),
                         std::log(c.dims.height / prior.height),
                         std::log(c.dims.length / prior.length)};
    enc.orientation_apparent = apparent_from_egocentric(c.orientation, c.center);
    return enc;
}

namespace detail {

// Exact zero when p == t so a perfect prediction scores 0; uses the
// convention 0 * log(0) = 0 elsewhere.
inline double binary_cross_entropy(double p, double t) {
    if (p == t) return 0.0;
    double loss = 0.0;
    if (t > 0.0) loss -= t * std::log(p);
    if (t < 1.0) loss -= (1.0 - t) * std::log(1.0 - p);
    return loss;
}

}  // namespace detail

struct Loss2D {
    double objectness = 0.0;
    double class_prob = 0.0;
    double box = 0.0;
    double total = 0.0;
};

// YOLO-style 2D term: cross-entropy on objectness and per-class
// probabilities, squared error on center and log width/height.
inline Loss2D loss_2d(const PredictionEncoding& pred, const Annotation& target) {
    if (target.box2d.width <= 0.0 || target.box2d.height <= 0.0)
        throw DegenerateBox("target box " + std::to_string(target.box2d.width) + " x " +
                            std::to_string(target.box2d.height));
    Loss2D out;
    out.objectness = detail::binary_cross_entropy(pred.objectness, 1.0);
    for (std::size_t i = 0; i < pred.class_probs.size(); ++i) {
        const double t = (static_cast<int>(i) == target.category) ? 1.0 : 0.0;
        out.class_prob += detail::binary_cross_entropy(pred.class_probs[i], t);
    }
    const double du = pred.box2d.center_u - target.box2d.center_u;
    const double dv = pred.box2d.center_v - target.box2d.center_v;
    if (pred.box2d.width <= 0.0 || pred.box2d.height <= 0.0)
        throw DegenerateBox("predicted box has non-positive size");
    const double dw = std::log(pred.box2d.width) - std::log(target.box2d.width);
    const double dh = std::log(pred.box2d.height) - std::log(target.box2d.height);
    out.box = du * du + dv * dv + dw * dw + dh * dh;
    out.total = out.objectness + out.class_prob + out.box;
    return out;
}

struct Loss3D {
    double center_group = 0.0;
    double dims_group = 0.0;
    double orientation_group = 0.0;
    double total = 0.0;
};

namespace detail {

inline double mean_corner_sq_distance(const Cuboid3D& a, const std::array<Point3, 8>& ref) {
    const auto ca = cuboid_corners(a);
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) {
        const Point3 d = ca[i] - ref[i];
        sum += dot(d, d);
    }
    return sum / 8.0;
}

}  // namespace detail

// Disentangled corner loss: one hybrid cuboid per parameter group,
// decoded from the predicted group and ground-truth encodings of the other
// two, scored as mean squared corner distance against the target corners.
inline Loss3D loss_3d_disentangled(const PredictionEncoding& pred, const Cuboid3D& target,
                                   const CameraIntrinsics& k, const CategoryPriors& priors,
                                   int category) {
    if (pred.depth <= 0.0)
        throw NonPositiveDepth("predicted depth = " + std::to_string(pred.depth));
    const PredictionEncoding gt = encode_cuboid(target, k, priors, category);
    const auto target_corners = cuboid_corners(target);

    PredictionEncoding hybrid = gt;
    hybrid.center_proj = pred.center_proj;
    hybrid.depth = pred.depth;
    Loss3D out;
    out.center_group =
        detail::mean_corner_sq_distance(decode_cuboid(hybrid, k, priors, category), target_corners);

    hybrid = gt;
    hybrid.dim_residuals = pred.dim_residuals;
    out.dims_group =
        detail::mean_corner_sq_distance(decode_cuboid(hybrid, k, priors, category), target_corners);

    hybrid = gt;
    hybrid.orientation_apparent = pred.orientation_apparent;
    out.orientation_group =
        detail::mean_corner_sq_distance(decode_cuboid(hybrid, k, priors, category), target_corners);

    out.total = out.center_group + out.dims_group + out.orientation_group;
    return out;
}

struct LossBreakdown {
    double objectness = 0.0;
    double class_prob = 0.0;
    double box = 0.0;
    double center_group = 0.0;
    double dims_group = 0.0;
    double orientation_group = 0.0;
    double loss_2d = 0.0;
    double loss_3d = 0.0;
    double total = 0.0;
};

using Matching = std::vector<std::pair<std::size_t, std::size_t>>;  // (pred, target)

// Sum of 2D terms over all matched pairs plus 3D terms over pairs whose
// target carries real 3D ground truth; the is_pseudo flag masks the rest.
inline LossBreakdown total_loss(const std::vector<PredictionEncoding>& preds,
                                const std::vector<Annotation>& targets, const Matching& matching,
                                const CameraIntrinsics& k, const CategoryPriors& priors) {
    LossBreakdown out;
    for (const auto& [pi, ti] : matching) {
        const PredictionEncoding& pred = preds.at(pi);
        const Annotation& target = targets.at(ti);
        const Loss2D l2 = loss_2d(pred, target);
        out.objectness += l2.objectness;
        out.class_prob += l2.class_prob;
        out.box += l2.box;
        out.loss_2d += l2.total;
        if (!target.is_pseudo) {
            const Loss3D l3 = loss_3d_disentangled(pred, *target.cuboid, k, priors, target.category);
            out.center_group += l3.center_group;
            out.dims_group += l3.dims_group;
            out.orientation_group += l3.orientation_group;
            out.loss_3d += l3.total;
        }
    }
    out.total = out.loss_2d + out.loss_3d;
    return out;
}

struct GradientCheckResult {
    double max_rel_error = 0.0;
    std::vector<double> grad_coarse;
    std::vector<double> grad_fine;
};

namespace detail {

inline std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                              std::vector<double> point, double eps) {
    std::vector<double> grad(point.size(), 0.0);
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double saved = point[i];
        point[i] = saved + eps;
        const double hi = f(point);
        point[i] = saved - eps;
        const double lo = f(point);
        point[i] = saved;
        if (!std::isfinite(hi) || !std::isfinite(lo))
            throw NonDifferentiablePoint("non-finite loss near coordinate " + std::to_string(i));
        grad[i] = (hi - lo) / (2.0 * eps);
    }
    return grad;
}

inline double max_rel_discrepancy(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1.0});
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

}  // namespace detail

// Self-consistency of central differences at two step sizes. No analytic
// gradients exist in this library, so smoothness is the checkable property.
inline GradientCheckResult gradient_check(const std::function<double(std::span<const double>)>& f,
                                          const std::vector<double>& point, double eps,
                                          double eps_fine) {
    GradientCheckResult out;
    out.grad_coarse = detail::central_difference(f, point, eps);
    out.grad_fine = detail::central_difference(f, point, eps_fine);
    out.max_rel_error = detail::max_rel_discrepancy(out.grad_coarse, out.grad_fine);
    return out;
}

// Comparison against a caller-supplied analytic gradient.
inline GradientCheckResult gradient_check(const std::function<double(std::span<const double>)>& f,
                                          const std::vector<double>& point, double eps,
                                          const std::vector<double>& analytic) {
    GradientCheckResult out;
    out.grad_coarse = detail::central_difference(f, point, eps);
    out.grad_fine = analytic;
    out.max_rel_error = detail::max_rel_discrepancy(out.grad_coarse, analytic);
    return out;
}

}  // namespace splkit
