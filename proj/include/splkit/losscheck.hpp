#pragma once

#include <cstring>
#include <iomanip>
#include <ostream>
#include <span>
#include <sstream>
#include <vector>

#include "splkit/datagen.hpp"
#include "splkit/loss.hpp"
#include "splkit/rng.hpp"

// Self-contained invariant and gradient suite for the loss module, exposed
// through the losscheck CLI subcommand. Every check prints one PASS/FAIL
// line; the suite as a whole passes only if all checks do.

namespace splkit {

inline CameraIntrinsics losscheck_intrinsics() {
    return {1000.0, 1000.0, 960.0, 540.0, 1920, 1080};
}

inline CategoryPriors losscheck_priors() {
    CategoryPriors priors;
    for (const CategorySpec& c : default_categories()) priors.mean_dims[c.id] = c.prior;
    return priors;
}

inline Quaternion random_rotation(Rng& rng) {
    Quaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    return q.normalized();
}

// A cuboid whose center projects inside the image and whose corners stay in
// front of the camera for any orientation.
inline Cuboid3D random_valid_cuboid(Rng& rng, const CategoryPriors& priors, int category) {
    const Dimensions3& prior = priors.at(category);
    Cuboid3D c;
    c.dims.width = prior.width * std::exp(rng.normal(0.0, 0.15));
    c.dims.height = prior.height * std::exp(rng.normal(0.0, 0.15));
    c.dims.length = prior.length * std::exp(rng.normal(0.0, 0.15));
    const double circ = std::sqrt(c.dims.width * c.dims.width + c.dims.height * c.dims.height +
                                  c.dims.length * c.dims.length) /
                        2.0;
    c.center.z = rng.uniform(circ + 8.0, 150.0);
    c.center.x = rng.uniform(-0.4, 0.4) * c.center.z;
    c.center.y = rng.uniform(-0.2, 0.2) * c.center.z;
    c.orientation = random_rotation(rng);
    return c;
}

// Encoding of `target` with every field nudged off the optimum; stays inside
// the differentiable domain.
inline PredictionEncoding random_encoding_near(const Cuboid3D& target, const Annotation& target_ann,
                                               const CameraIntrinsics& k, const CategoryPriors& priors,
                                               int category, int n_classes, Rng& rng) {
    PredictionEncoding enc = encode_cuboid(target, k, priors, category);
    enc.center_proj.u += rng.normal(0.0, 5.0);
    enc.center_proj.v += rng.normal(0.0, 5.0);
    enc.depth *= std::exp(rng.normal(0.0, 0.05));
    for (double& r : enc.dim_residuals) r += rng.normal(0.0, 0.1);
    enc.orientation_apparent.w += rng.normal(0.0, 0.05);
    enc.orientation_apparent.x += rng.normal(0.0, 0.05);
    enc.orientation_apparent.y += rng.normal(0.0, 0.05);
    enc.orientation_apparent.z += rng.normal(0.0, 0.05);
    enc.orientation_apparent = enc.orientation_apparent.normalized();
    enc.box2d = target_ann.box2d;
    enc.box2d.center_u += rng.normal(0.0, 3.0);
    enc.box2d.center_v += rng.normal(0.0, 3.0);
    enc.box2d.width *= std::exp(rng.normal(0.0, 0.1));
    enc.box2d.height *= std::exp(rng.normal(0.0, 0.1));
    enc.objectness = rng.uniform(0.5, 0.95);
    enc.class_probs.assign(n_classes, 0.0);
    for (double& p : enc.class_probs) p = rng.uniform(0.1, 0.9);
    return enc;
}

// Flat parameter layout used by the gradient checks:
// [cu, cv, w, h, objectness, class_probs..., proj_u, proj_v, depth,
//  res_w, res_h, res_l, qw, qx, qy, qz]
inline std::vector<double> encoding_to_parameters(const PredictionEncoding& enc) {
    std::vector<double> x{enc.box2d.center_u, enc.box2d.center_v, enc.box2d.width,
                          enc.box2d.height, enc.objectness};
    x.insert(x.end(), enc.class_probs.begin(), enc.class_probs.end());
    x.insert(x.end(), {enc.center_proj.u, enc.center_proj.v, enc.depth, enc.dim_residuals[0],
                       enc.dim_residuals[1], enc.dim_residuals[2], enc.orientation_apparent.w,
                       enc.orientation_apparent.x, enc.orientation_apparent.y,
                       enc.orientation_apparent.z});
    return x;
}

inline PredictionEncoding encoding_from_parameters(std::span<const double> x, int n_classes) {
    PredictionEncoding enc;
    enc.box2d = {x[0], x[1], x[2], x[3]};
    enc.objectness = x[4];
    enc.class_probs.assign(x.begin() + 5, x.begin() + 5 + n_classes);
    const std::size_t o = 5 + static_cast<std::size_t>(n_classes);
    enc.center_proj = {x[o], x[o + 1]};
    enc.depth = x[o + 2];
    enc.dim_residuals = {x[o + 3], x[o + 4], x[o + 5]};
    enc.orientation_apparent = {x[o + 6], x[o + 7], x[o + 8], x[o + 9]};
    return enc;
}

// Index ranges of the 3D fields within the flat layout.
inline std::pair<std::size_t, std::size_t> parameter_range_3d(int n_classes) {
    const std::size_t start = 5 + static_cast<std::size_t>(n_classes);
    return {start, start + 10};
}

namespace losscheck_detail {

inline bool bitwise_equal(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

inline bool breakdown_bitwise_equal(const LossBreakdown& a, const LossBreakdown& b) {
    return bitwise_equal(a.objectness, b.objectness) && bitwise_equal(a.class_prob, b.class_prob) &&
           bitwise_equal(a.box, b.box) && bitwise_equal(a.center_group, b.center_group) &&
           bitwise_equal(a.dims_group, b.dims_group) &&
           bitwise_equal(a.orientation_group, b.orientation_group) &&
           bitwise_equal(a.loss_2d, b.loss_2d) && bitwise_equal(a.loss_3d, b.loss_3d) &&
           bitwise_equal(a.total, b.total);
}

inline Annotation annotation_for(const Cuboid3D& c, const CameraIntrinsics& k, int category) {
    Annotation ann;
    ann.category = category;
    ann.box2d = project_cuboid_to_box2d(k, c);
    ann.cuboid = c;
    ann.confidence = 1.0;
    ann.is_pseudo = false;
    return ann;
}

}  // namespace losscheck_detail

inline bool run_losscheck(std::uint64_t seed, int trials, std::ostream& out) {
    const CameraIntrinsics k = losscheck_intrinsics();
    const CategoryPriors priors = losscheck_priors();
    const int n_classes = static_cast<int>(priors.mean_dims.size());
    bool all_ok = true;
    auto verdict = [&](bool ok, const std::string& name, const std::string& detail) {
        out << (ok ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
        all_ok = all_ok && ok;
    };

    {  // encode/decode round trip
        Rng rng(seed + 1);
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            const int cat = rng.uniform_int(0, n_classes - 1);
            const Cuboid3D c = random_valid_cuboid(rng, priors, cat);
            const PredictionEncoding enc = encode_cuboid(c, k, priors, cat);
            const Cuboid3D dec = decode_cuboid(enc, k, priors, cat);
            worst = std::max(worst, norm(dec.center - c.center));
            worst = std::max(worst, std::abs(dec.dims.width - c.dims.width));
            worst = std::max(worst, std::abs(dec.dims.height - c.dims.height));
            worst = std::max(worst, std::abs(dec.dims.length - c.dims.length));
            worst = std::max(worst, rotation_distance(dec.orientation, c.orientation));
            const PredictionEncoding re = encode_cuboid(dec, k, priors, cat);
            worst = std::max(worst, std::abs(re.center_proj.u - enc.center_proj.u));
            worst = std::max(worst, std::abs(re.center_proj.v - enc.center_proj.v));
            worst = std::max(worst, std::abs(re.depth - enc.depth));
        }
        std::ostringstream msg;
        msg << "max error " << std::scientific << std::setprecision(2) << worst << " over "
            << trials << " trials";
        verdict(worst < 1e-9, "decode_encode_round_trip", msg.str());
    }

    {  // exact match scores zero
        Rng rng(seed + 2);
        bool ok = true;
        for (int t = 0; t < trials && ok; ++t) {
            const int cat = rng.uniform_int(0, n_classes - 1);
            const Cuboid3D c = random_valid_cuboid(rng, priors, cat);
            const Annotation ann = losscheck_detail::annotation_for(c, k, cat);
            PredictionEncoding enc = encode_cuboid(c, k, priors, cat);
            enc.box2d = ann.box2d;
            enc.objectness = 1.0;
            enc.class_probs.assign(n_classes, 0.0);
            enc.class_probs[cat] = 1.0;
            const LossBreakdown l = total_loss({enc}, {ann}, {{0, 0}}, k, priors);
            ok = ok && l.total == 0.0;
        }
        verdict(ok, "exact_match_zero_loss", std::to_string(trials) + " trials");
    }

    {  // pseudo-label masking is bit-exact
        Rng rng(seed + 3);
        bool ok = true;
        for (int t = 0; t < trials && ok; ++t) {
            const int cat = rng.uniform_int(0, n_classes - 1);
            const Cuboid3D c = random_valid_cuboid(rng, priors, cat);
            Annotation ann = losscheck_detail::annotation_for(c, k, cat);
            ann.cuboid.reset();
            ann.is_pseudo = true;
            PredictionEncoding enc =
                random_encoding_near(c, losscheck_detail::annotation_for(c, k, cat), k, priors, cat,
                                     n_classes, rng);
            const LossBreakdown before = total_loss({enc}, {ann}, {{0, 0}}, k, priors);
            enc.center_proj.u += rng.normal(0.0, 50.0);
            enc.center_proj.v += rng.normal(0.0, 50.0);
            enc.depth *= std::exp(rng.normal(0.0, 0.5));
            for (double& r : enc.dim_residuals) r += rng.normal(0.0, 1.0);
            enc.orientation_apparent = random_rotation(rng);
            const LossBreakdown after = total_loss({enc}, {ann}, {{0, 0}}, k, priors);
            ok = ok && losscheck_detail::breakdown_bitwise_equal(before, after) &&
                 after.loss_3d == 0.0;
        }
        verdict(ok, "pseudo_mask_bit_identical", std::to_string(trials) + " perturbations");
    }

    {  // non-pseudo 3D perturbations strictly increase the 3D loss
        Rng rng(seed + 4);
        bool ok = true;
        for (int t = 0; t < trials && ok; ++t) {
            const int cat = rng.uniform_int(0, n_classes - 1);
            const Cuboid3D c = random_valid_cuboid(rng, priors, cat);
            const Annotation ann = losscheck_detail::annotation_for(c, k, cat);
            PredictionEncoding enc = encode_cuboid(c, k, priors, cat);
            enc.box2d = ann.box2d;
            enc.objectness = 1.0;
            enc.class_probs.assign(n_classes, 0.0);
            enc.class_probs[cat] = 1.0;
            std::vector<double> x = encoding_to_parameters(enc);
            const auto [lo, hi] = parameter_range_3d(n_classes);
            const std::size_t idx = lo + static_cast<std::size_t>(rng.uniform_int(
                                             0, static_cast<int>(hi - lo) - 1));
            const double delta = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(1e-3, 0.3);
            x[idx] += delta;
            const PredictionEncoding perturbed = encoding_from_parameters(x, n_classes);
            const LossBreakdown l = total_loss({perturbed}, {ann}, {{0, 0}}, k, priors);
            ok = ok && l.loss_3d > 0.0;
        }
        verdict(ok, "non_pseudo_perturbation_increases_loss3d", std::to_string(trials) + " trials");
    }

    {  // disentanglement: one group moves, the other sub-terms are bit-equal
        Rng rng(seed + 5);
        bool ok = true;
        for (int t = 0; t < trials && ok; ++t) {
            const int cat = rng.uniform_int(0, n_classes - 1);
            const Cuboid3D c = random_valid_cuboid(rng, priors, cat);
            const Annotation ann = losscheck_detail::annotation_for(c, k, cat);
            PredictionEncoding enc =
                random_encoding_near(c, ann, k, priors, cat, n_classes, rng);
            const Loss3D before = loss_3d_disentangled(enc, c, k, priors, cat);
            const int group = rng.uniform_int(0, 2);
            if (group == 0) {
                enc.center_proj.u += rng.normal(0.0, 10.0);
                enc.depth *= std::exp(rng.normal(0.0, 0.2));
            } else if (group == 1) {
                for (double& r : enc.dim_residuals) r += rng.normal(0.0, 0.3);
            } else {
                enc.orientation_apparent = random_rotation(rng);
            }
            const Loss3D after = loss_3d_disentangled(enc, c, k, priors, cat);
            if (group != 0)
                ok = ok && losscheck_detail::bitwise_equal(before.center_group, after.center_group);
            if (group != 1)
                ok = ok && losscheck_detail::bitwise_equal(before.dims_group, after.dims_group);
            if (group != 2)
                ok = ok && losscheck_detail::bitwise_equal(before.orientation_group,
                                                           after.orientation_group);
        }
        verdict(ok, "disentangled_groups_independent", std::to_string(trials) + " trials");
    }

    {  // central-difference self-consistency
        Rng rng(seed + 6);
        const int points = std::min(trials, 100);
        double worst = 0.0;
        for (int t = 0; t < points; ++t) {
            const int cat = rng.uniform_int(0, n_classes - 1);
            const Cuboid3D c = random_valid_cuboid(rng, priors, cat);
            const Annotation ann = losscheck_detail::annotation_for(c, k, cat);
            const PredictionEncoding enc =
                random_encoding_near(c, ann, k, priors, cat, n_classes, rng);
            const auto f = [&](std::span<const double> x) {
                const PredictionEncoding e = encoding_from_parameters(x, n_classes);
                return total_loss({e}, {ann}, {{0, 0}}, k, priors).total;
            };
            const GradientCheckResult r =
                gradient_check(f, encoding_to_parameters(enc), 1e-4, 1e-5);
            worst = std::max(worst, r.max_rel_error);
        }
        std::ostringstream msg;
        msg << "max relative discrepancy " << std::scientific << std::setprecision(2) << worst
            << " over " << points << " points";
        verdict(worst < 1e-3, "gradient_self_consistency", msg.str());
    }

    {  // masked 3D parameters have exactly zero gradient
        Rng rng(seed + 7);
        bool ok = true;
        for (int t = 0; t < std::min(trials, 50) && ok; ++t) {
            const int cat = rng.uniform_int(0, n_classes - 1);
            const Cuboid3D c = random_valid_cuboid(rng, priors, cat);
            Annotation ann = losscheck_detail::annotation_for(c, k, cat);
            ann.cuboid.reset();
            ann.is_pseudo = true;
            const PredictionEncoding enc = random_encoding_near(
                c, losscheck_detail::annotation_for(c, k, cat), k, priors, cat, n_classes, rng);
            const auto f = [&](std::span<const double> x) {
                const PredictionEncoding e = encoding_from_parameters(x, n_classes);
                return total_loss({e}, {ann}, {{0, 0}}, k, priors).total;
            };
            const GradientCheckResult r = gradient_check(f, encoding_to_parameters(enc), 1e-4, 1e-5);
            const auto [lo, hi] = parameter_range_3d(n_classes);
            for (std::size_t i = lo; i < hi; ++i)
                ok = ok && r.grad_coarse[i] == 0.0 && r.grad_fine[i] == 0.0;
        }
        verdict(ok, "masked_gradient_exactly_zero", "central differences on pseudo targets");
    }

    {  // batch additivity and 2D+3D consistency
        Rng rng(seed + 8);
        bool ok = true;
        double worst = 0.0;
        for (int t = 0; t < std::min(trials, 50) && ok; ++t) {
            const int batch = rng.uniform_int(2, 6);
            std::vector<PredictionEncoding> preds;
            std::vector<Annotation> targets;
            Matching matching;
            for (int b = 0; b < batch; ++b) {
                const int cat = rng.uniform_int(0, n_classes - 1);
                const Cuboid3D c = random_valid_cuboid(rng, priors, cat);
                Annotation ann = losscheck_detail::annotation_for(c, k, cat);
                if (rng.uniform01() < 0.4) {
                    ann.cuboid.reset();
                    ann.is_pseudo = true;
                }
                preds.push_back(random_encoding_near(
                    c, losscheck_detail::annotation_for(c, k, cat), k, priors, cat, n_classes, rng));
                targets.push_back(ann);
                matching.emplace_back(b, b);
            }
            const LossBreakdown whole = total_loss(preds, targets, matching, k, priors);
            double sum = 0.0;
            for (int b = 0; b < batch; ++b)
                sum += total_loss({preds[b]}, {targets[b]}, {{0, 0}}, k, priors).total;
            worst = std::max(worst, std::abs(whole.total - sum));
            worst = std::max(worst, std::abs(whole.total - (whole.loss_2d + whole.loss_3d)));
            ok = ok && whole.objectness >= 0 && whole.class_prob >= 0 && whole.box >= 0 &&
                 whole.center_group >= 0 && whole.dims_group >= 0 && whole.orientation_group >= 0;
        }
        std::ostringstream msg;
        msg << "max deviation " << std::scientific << std::setprecision(2) << worst;
        verdict(ok && worst < 1e-12, "batch_additivity", msg.str());
    }

    return all_ok;
}

}  // namespace splkit
