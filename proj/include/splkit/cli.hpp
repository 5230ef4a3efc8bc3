#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splkit/augment.hpp"
#include "splkit/datagen.hpp"
#include "splkit/dataset_io.hpp"
#include "splkit/eval.hpp"
#include "splkit/losscheck.hpp"
#include "splkit/parallel.hpp"
#include "splkit/reports.hpp"
#include "splkit/spl.hpp"

// CLI front end. Exit codes: 0 success, 1 validation/data failure, 2 usage
// error. Every subcommand is deterministic given its flags and seed, and
// serial/parallel runs write identical bytes.

namespace splkit::cli {

struct UsageError : Error {
    using Error::Error;
};

namespace detail {

inline std::vector<std::pair<double, double>> parse_knots(const std::string& text) {
    std::vector<std::pair<double, double>> knots;
    if (text.empty()) return knots;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw UsageError("expected 'distance:probability' pairs, got '" + item + "'");
        try {
            knots.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw UsageError("cannot parse knot '" + item + "'");
        }
    }
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (knots[i].first <= knots[i - 1].first)
            throw UsageError("dropout knots must have strictly increasing distances");
    for (const auto& [z, p] : knots)
        if (p < 0.0 || p > 1.0) throw UsageError("dropout probability must be in [0,1]");
    return knots;
}

inline CategoryMap parse_class_map(const std::string& text) {
    CategoryMap map;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw UsageError("expected 'simple:complex' id pairs, got '" + item + "'");
        try {
            map[std::stoi(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("cannot parse class-map entry '" + item + "'");
        }
    }
    return map;
}

inline std::string format_u64(std::uint64_t v) { return std::to_string(v); }

inline std::vector<CategoryInfo> category_infos(const std::vector<CategorySpec>& specs) {
    std::vector<CategoryInfo> out;
    for (const CategorySpec& s : specs) out.push_back({s.id, s.name, s.prior});
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------- synth ---

struct SynthOptions {
    std::string out;
    std::string full_out;
    std::string oracle_detections;
    std::string predictions;
    int frames = 10;
    std::uint64_t seed = 0;
    int threads = 1;
    double cutoff = 0.0;  // 0 disables
    SceneConfig scene;
    std::string oracle_dropout;
    double oracle_box_noise = 0.0;
    double oracle_confidence_noise = 0.0;
    std::string pred_dropout;
    double pred_longitudinal_coeff = 0.0;
    double pred_lateral_std = 0.0;
    double pred_yaw_noise_deg = 0.0;
    double pred_confidence_noise = 0.0;
};

inline int run_synth(const SynthOptions& opt) {
    ErrorModel oracle_error;
    oracle_error.box_noise_px = opt.oracle_box_noise;
    oracle_error.confidence_noise = opt.oracle_confidence_noise;
    oracle_error.dropout_knots = detail::parse_knots(opt.oracle_dropout);
    ErrorModel pred_error;
    pred_error.longitudinal_coeff = opt.pred_longitudinal_coeff;
    pred_error.lateral_std = opt.pred_lateral_std;
    pred_error.yaw_noise_deg = opt.pred_yaw_noise_deg;
    pred_error.confidence_noise = opt.pred_confidence_noise;
    pred_error.dropout_knots = detail::parse_knots(opt.pred_dropout);

    std::vector<Frame> frames(opt.frames);
    parallel_for(frames.size(), opt.threads,
                 [&](std::size_t i) { frames[i] = generate_scene(opt.scene, opt.seed, i); });

    const int n_categories = static_cast<int>(opt.scene.categories.size());
    std::vector<std::pair<std::string, std::string>> base_params = {
        {"frames", std::to_string(opt.frames)},
        {"seed", detail::format_u64(opt.seed)},
        {"z_min", io_detail::fmt_double(opt.scene.z_min)},
        {"z_max", io_detail::fmt_double(opt.scene.z_max)},
        {"backward_fraction", io_detail::fmt_double(opt.scene.backward_fraction)},
    };

    if (!opt.oracle_detections.empty()) {
        std::vector<std::vector<Detection2D>> dets(frames.size());
        parallel_for(frames.size(), opt.threads, [&](std::size_t i) {
            dets[i] = oracle_detector_2d(frames[i], oracle_error, opt.seed, n_categories);
        });
        std::map<std::string, std::vector<Detection2D>> by_id;
        for (std::size_t i = 0; i < frames.size(); ++i) by_id[frames[i].id] = std::move(dets[i]);
        write_detections(by_id, opt.oracle_detections);
        std::cout << "wrote detections: " << opt.oracle_detections << "\n";
    }

    if (!opt.predictions.empty()) {
        Dataset preds;
        preds.manifest.categories = detail::category_infos(opt.scene.categories);
        ProvenanceEntry entry{"predict", base_params};
        entry.params.emplace_back("longitudinal_coeff",
                                  io_detail::fmt_double(opt.pred_longitudinal_coeff));
        entry.params.emplace_back("lateral_std", io_detail::fmt_double(opt.pred_lateral_std));
        preds.manifest.provenance.push_back(entry);
        preds.frames = frames;
        std::vector<std::vector<Annotation>> pred_anns(frames.size());
        parallel_for(frames.size(), opt.threads, [&](std::size_t i) {
            pred_anns[i] = noisy_predictor_3d(frames[i], pred_error, opt.seed);
        });
        for (std::size_t i = 0; i < frames.size(); ++i) {
            preds.frames[i].annotations = std::move(pred_anns[i]);
            preds.frames[i].raster.reset();
        }
        write_dataset(preds, opt.predictions);
        std::cout << "wrote predictions: " << opt.predictions << "\n";
    }

    if (!opt.full_out.empty()) {
        Dataset full;
        full.manifest.categories = detail::category_infos(opt.scene.categories);
        full.manifest.provenance.push_back({"synth", base_params});
        full.frames = frames;
        write_dataset(full, opt.full_out);
        std::cout << "wrote full dataset: " << opt.full_out << "\n";
    }

    Dataset ds;
    ds.manifest.categories = detail::category_infos(opt.scene.categories);
    ProvenanceEntry entry{"synth", base_params};
    if (opt.cutoff > 0.0) {
        for (Frame& f : frames) f = apply_annotation_cutoff(f, opt.cutoff);
        entry.params.emplace_back("cutoff", io_detail::fmt_double(opt.cutoff));
    }
    ds.manifest.provenance.push_back(entry);
    ds.frames = std::move(frames);
    write_dataset(ds, opt.out);
    std::cout << "wrote dataset: " << opt.out << " (" << ds.frames.size() << " frames)\n";
    return 0;
}

// ----------------------------------------------------------------- fuse ---

struct FuseOptions {
    std::string in;
    std::string detections;
    std::string out;
    double iou_threshold = 0.5;
    std::string class_map;
    int threads = 1;
};

inline int run_fuse(const FuseOptions& opt) {
    Dataset ds = read_dataset(opt.in);
    const auto detections = read_detections(opt.detections);
    const CategoryMap map =
        opt.class_map.empty()
            ? identity_category_map(static_cast<int>(ds.manifest.categories.size()))
            : detail::parse_class_map(opt.class_map);

    std::vector<Frame> fused(ds.frames.size());
    std::vector<FuseStats> stats(ds.frames.size());
    const std::vector<Detection2D> none;
    parallel_for(ds.frames.size(), opt.threads, [&](std::size_t i) {
        const auto it = detections.find(ds.frames[i].id);
        fused[i] = fuse_frame(ds.frames[i], it == detections.end() ? none : it->second,
                              opt.iou_threshold, map, &stats[i]);
    });
    FuseStats total;
    for (const FuseStats& s : stats) {
        total.added += s.added;
        total.filtered += s.filtered;
    }
    ds.frames = std::move(fused);
    ds.manifest.provenance.push_back(
        {"fuse",
         {{"iou_threshold", io_detail::fmt_double(opt.iou_threshold)},
          {"added", std::to_string(total.added)},
          {"filtered", std::to_string(total.filtered)}}});
    write_dataset(ds, opt.out);
    std::cout << "fused: added=" << total.added << " filtered=" << total.filtered << " -> "
              << opt.out << "\n";
    return 0;
}

// -------------------------------------------------------------- augment ---

struct AugmentOptions {
    std::string in;
    std::string out;
    std::uint64_t seed = 0;
    double scale_lower = 0.5;
    double scale_upper = 2.0;
    double shift_fraction = 0.1;
    double visibility_threshold = 0.25;
    int threads = 1;
};

inline int run_augment(const AugmentOptions& opt) {
    if (opt.scale_lower <= 0.0 || opt.scale_upper < opt.scale_lower)
        throw UsageError("scale bounds must satisfy 0 < lower <= upper");
    Dataset ds = read_dataset(opt.in);
    const ScaleBounds bounds{opt.scale_lower, opt.scale_upper};
    std::vector<Frame> out(ds.frames.size());
    parallel_for(ds.frames.size(), opt.threads, [&](std::size_t i) {
        Rng rng = Rng::stream(opt.seed, i, /*tag=*/4);
        ZoomShiftParams params;
        params.scale = draw_scale(bounds, rng);
        params.shift_u =
            rng.uniform(-opt.shift_fraction, opt.shift_fraction) * ds.frames[i].intrinsics.width;
        params.shift_v =
            rng.uniform(-opt.shift_fraction, opt.shift_fraction) * ds.frames[i].intrinsics.height;
        out[i] = augment_frame(ds.frames[i], params, opt.visibility_threshold);
    });
    ds.frames = std::move(out);
    ds.manifest.provenance.push_back(
        {"augment",
         {{"seed", detail::format_u64(opt.seed)},
          {"scale_lower", io_detail::fmt_double(opt.scale_lower)},
          {"scale_upper", io_detail::fmt_double(opt.scale_upper)},
          {"shift_fraction", io_detail::fmt_double(opt.shift_fraction)},
          {"visibility_threshold", io_detail::fmt_double(opt.visibility_threshold)}}});
    write_dataset(ds, opt.out);
    std::cout << "augmented " << ds.frames.size() << " frames -> " << opt.out << "\n";
    return 0;
}

// ----------------------------------------------------------------- eval ---

struct EvalOptions {
    std::string gt;
    std::string pred;
    std::string out_dir;
    double iou_threshold = 0.5;
    double conf_threshold = 0.5;
    HeatmapConfig heatmap;
    int threads = 1;
};

namespace detail {

struct PairedFrames {
    std::vector<std::vector<EvalObject>> gt_image, pred_image;
    std::vector<std::vector<EvalObject>> gt_bev, pred_bev;
    std::vector<std::vector<GroundPoint>> gt_points, pred_points;
};

inline PairedFrames pair_frames(const Dataset& gt, const Dataset& pred) {
    std::map<std::string, const Frame*> pred_by_id;
    for (const Frame& f : pred.frames) pred_by_id[f.id] = &f;
    std::map<std::string, bool> matched;

    PairedFrames out;
    for (const Frame& g : gt.frames) {
        std::vector<EvalObject> gi, pi, gb, pb;
        std::vector<GroundPoint> gp, pp;
        for (const Annotation& a : g.annotations) {
            EvalObject obj{a.box2d, a.cuboid, a.category, 1.0};
            gi.push_back(obj);
            if (a.cuboid) {
                gb.push_back(obj);
                gp.push_back(ego_position(*a.cuboid, g.facing));
            }
        }
        const auto it = pred_by_id.find(g.id);
        if (it != pred_by_id.end()) {
            matched[g.id] = true;
            if (it->second->facing != g.facing)
                throw Error("frame " + g.id + ": facing differs between datasets");
            for (const Annotation& a : it->second->annotations) {
                EvalObject obj{a.box2d, a.cuboid, a.category, a.confidence};
                pi.push_back(obj);
                if (a.cuboid) {
                    pb.push_back(obj);
                    pp.push_back(ego_position(*a.cuboid, it->second->facing));
                }
            }
        }
        out.gt_image.push_back(std::move(gi));
        out.pred_image.push_back(std::move(pi));
        out.gt_bev.push_back(std::move(gb));
        out.pred_bev.push_back(std::move(pb));
        out.gt_points.push_back(std::move(gp));
        out.pred_points.push_back(std::move(pp));
    }
    for (const Frame& f : pred.frames)
        if (!matched.count(f.id))
            throw Error("prediction frame '" + f.id + "' has no ground-truth counterpart");
    return out;
}

inline std::vector<std::vector<EvalObject>> filter_category(
    const std::vector<std::vector<EvalObject>>& frames, int category) {
    std::vector<std::vector<EvalObject>> out;
    out.reserve(frames.size());
    for (const auto& fr : frames) {
        std::vector<EvalObject> kept;
        for (const EvalObject& o : fr)
            if (o.category == category) kept.push_back(o);
        out.push_back(std::move(kept));
    }
    return out;
}

inline MetricsRow metrics_row(const std::string& scope, const std::string& space,
                              const std::vector<std::vector<EvalObject>>& gts,
                              const std::vector<std::vector<EvalObject>>& preds, MatchSpace ms,
                              double iou_threshold, double conf_threshold, int threads) {
    MetricsRow row;
    row.scope = scope;
    row.space = space;
    const PRCurve curve = pr_curve_and_auc(gts, preds, ms, iou_threshold, threads);
    row.auc = curve.auc;
    row.degenerate = curve.degenerate;
    const PRPoint pt = metrics_at_threshold(gts, preds, ms, iou_threshold, conf_threshold);
    row.precision = pt.precision;
    row.recall = pt.recall;
    row.tp = pt.tp;
    row.fp = pt.fp;
    row.fn = pt.fn;
    for (const auto& fr : gts) row.n_gt += static_cast<long>(fr.size());
    for (const auto& fr : preds) row.n_pred += static_cast<long>(fr.size());
    return row;
}

}  // namespace detail

inline int run_eval(const EvalOptions& opt) {
    const Dataset gt = read_dataset(opt.gt);
    const Dataset pred = read_dataset(opt.pred);
    if (gt.manifest.categories.size() != pred.manifest.categories.size())
        throw Error("ground truth and predictions disagree on the category table");
    for (std::size_t i = 0; i < gt.manifest.categories.size(); ++i)
        if (gt.manifest.categories[i].id != pred.manifest.categories[i].id ||
            gt.manifest.categories[i].name != pred.manifest.categories[i].name)
            throw Error("ground truth and predictions disagree on the category table");

    const detail::PairedFrames paired = detail::pair_frames(gt, pred);
    const std::filesystem::path dir(opt.out_dir);

    std::vector<MetricsRow> rows;
    rows.push_back(detail::metrics_row("overall", "image", paired.gt_image, paired.pred_image,
                                       MatchSpace::image, opt.iou_threshold, opt.conf_threshold,
                                       opt.threads));
    rows.push_back(detail::metrics_row("overall", "bev", paired.gt_bev, paired.pred_bev,
                                       MatchSpace::bev, opt.iou_threshold, opt.conf_threshold,
                                       opt.threads));
    for (const CategoryInfo& cat : gt.manifest.categories) {
        std::string scope = cat.name;
        for (char& c : scope)
            if (c == ',') c = '_';
        rows.push_back(detail::metrics_row(
            scope, "image", detail::filter_category(paired.gt_image, cat.id),
            detail::filter_category(paired.pred_image, cat.id), MatchSpace::image,
            opt.iou_threshold, opt.conf_threshold, opt.threads));
        rows.push_back(detail::metrics_row(
            scope, "bev", detail::filter_category(paired.gt_bev, cat.id),
            detail::filter_category(paired.pred_bev, cat.id), MatchSpace::bev, opt.iou_threshold,
            opt.conf_threshold, opt.threads));
    }
    write_metrics_csv(dir / "metrics.csv", rows);

    write_pr_csv(dir / "pr_image.csv", pr_curve_and_auc(paired.gt_image, paired.pred_image,
                                                        MatchSpace::image, opt.iou_threshold,
                                                        opt.threads));
    write_pr_csv(dir / "pr_bev.csv", pr_curve_and_auc(paired.gt_bev, paired.pred_bev,
                                                      MatchSpace::bev, opt.iou_threshold,
                                                      opt.threads));

    const HeatmapGrid grid =
        heatmap_eval(paired.gt_points, paired.pred_points, opt.heatmap, opt.threads);
    write_heatmap_csv(dir / "heatmap_precision.csv", grid, HeatmapKind::precision);
    write_heatmap_csv(dir / "heatmap_recall.csv", grid, HeatmapKind::recall);
    write_heatmap_counts_csv(dir / "heatmap_counts.csv", grid);
    write_heatmap_summary_csv(dir / "heatmap_summary.csv", grid);
    write_heatmap_ppm(dir / "heatmap_precision.ppm", grid, HeatmapKind::precision);
    write_heatmap_ppm(dir / "heatmap_recall.ppm", grid, HeatmapKind::recall);

    std::cout << "image AUC " << io_detail::fmt_double(rows[0].auc) << ", bev AUC "
              << io_detail::fmt_double(rows[1].auc) << ", heatmap totals P "
              << io_detail::fmt_double(grid.total_precision) << " / R "
              << io_detail::fmt_double(grid.total_recall) << "\n";
    std::cout << "reports written to " << opt.out_dir << "\n";
    return 0;
}

// ------------------------------------------------------------ losscheck ---

struct LosscheckOptions {
    std::uint64_t seed = 0;
    int trials = 200;
};

inline int run_losscheck_cmd(const LosscheckOptions& opt) {
    const bool ok = run_losscheck(opt.seed, opt.trials, std::cout);
    std::cout << (ok ? "losscheck: all checks passed\n" : "losscheck: FAILURES detected\n");
    return ok ? 0 : 1;
}

// --------------------------------------------------------------- report ---

struct ReportOptions {
    std::string eval_dir;
};

inline int run_report(const ReportOptions& opt) {
    const std::filesystem::path dir(opt.eval_dir);
    std::ifstream metrics(dir / "metrics.csv");
    if (!metrics) throw Error("no metrics.csv under " + opt.eval_dir + "; run eval first");

    std::cout << "evaluation summary (" << opt.eval_dir << ")\n";
    std::cout << std::left << std::setw(14) << "scope" << std::setw(7) << "space" << std::right
              << std::setw(10) << "auc" << std::setw(11) << "precision" << std::setw(9) << "recall"
              << std::setw(7) << "tp" << std::setw(7) << "fp" << std::setw(7) << "fn" << "\n";
    std::string line;
    std::getline(metrics, line);  // header
    while (std::getline(metrics, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 11) throw MalformedRecord("metrics.csv: bad row '" + line + "'");
        std::cout << std::left << std::setw(14) << fields[0] << std::setw(7) << fields[1]
                  << std::right << std::setw(10) << fields[2] << std::setw(11) << fields[3]
                  << std::setw(9) << fields[4] << std::setw(7) << fields[5] << std::setw(7)
                  << fields[6] << std::setw(7) << fields[7];
        if (fields[10] == "1") std::cout << "  (degenerate: no objects)";
        std::cout << "\n";
    }

    std::ifstream summary(dir / "heatmap_summary.csv");
    if (summary) {
        std::getline(summary, line);  // header
        if (std::getline(summary, line)) {
            std::stringstream ss(line);
            std::string field;
            std::vector<std::string> fields;
            while (std::getline(ss, field, ',')) fields.push_back(field);
            if (fields.size() >= 5) {
                std::cout << "heatmap totals: precision " << fields[0] << ", recall " << fields[1]
                          << " (overflow tp/fp/fn " << fields[2] << "/" << fields[3] << "/"
                          << fields[4] << ")\n";
            }
        }
    }
    return 0;
}

// ------------------------------------------------------------- dispatch ---

inline int run_command(const std::vector<std::string>& args) {
    CLI::App app{"semi-pseudo-labeling dataset toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--out", synth.out, "output dataset (JSONL)")->required();
    synth_cmd->add_option("--full-out", synth.full_out, "also write the dataset without cutoff");
    synth_cmd->add_option("--frames", synth.frames, "number of frames")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth.seed, "rng seed");
    synth_cmd->add_option("--threads", synth.threads, "worker threads");
    synth_cmd->add_option("--cutoff", synth.cutoff, "annotation range cutoff in meters (0 = off)");
    synth_cmd->add_option("--min-objects", synth.scene.min_objects, "objects per frame, lower bound");
    synth_cmd->add_option("--max-objects", synth.scene.max_objects, "objects per frame, upper bound");
    synth_cmd->add_option("--z-min", synth.scene.z_min, "nearest object distance, meters");
    synth_cmd->add_option("--z-max", synth.scene.z_max, "farthest object distance, meters");
    synth_cmd->add_option("--lateral-limit", synth.scene.lateral_limit, "lateral placement, meters");
    synth_cmd->add_option("--backward-fraction", synth.scene.backward_fraction,
                          "fraction of rear-camera frames");
    synth_cmd->add_flag("--rasters", synth.scene.with_raster, "render flat-shaded rasters");
    synth_cmd->add_option("--raster-width", synth.scene.raster_width, "raster width, pixels");
    synth_cmd->add_option("--raster-height", synth.scene.raster_height, "raster height, pixels");
    synth_cmd->add_option("--oracle-detections", synth.oracle_detections,
                          "write 2D oracle detections (JSONL)");
    synth_cmd->add_option("--oracle-box-noise", synth.oracle_box_noise, "2D box noise std, pixels");
    synth_cmd->add_option("--oracle-dropout", synth.oracle_dropout,
                          "dropout knots, e.g. 150:0,200:0.7");
    synth_cmd->add_option("--oracle-confidence-noise", synth.oracle_confidence_noise,
                          "score noise std");
    synth_cmd->add_option("--predictions", synth.predictions,
                          "write noisy 3D predictions as a dataset (JSONL)");
    synth_cmd->add_option("--pred-longitudinal-coeff", synth.pred_longitudinal_coeff,
                          "3D noise std = coeff * distance");
    synth_cmd->add_option("--pred-lateral-std", synth.pred_lateral_std, "lateral 3D noise, meters");
    synth_cmd->add_option("--pred-yaw-noise-deg", synth.pred_yaw_noise_deg, "yaw noise std, degrees");
    synth_cmd->add_option("--pred-dropout", synth.pred_dropout, "prediction dropout knots");
    synth_cmd->add_option("--pred-confidence-noise", synth.pred_confidence_noise,
                          "prediction score noise std");

    FuseOptions fuse;
    auto* fuse_cmd = app.add_subcommand("fuse", "merge 2D detections as semi-pseudo-labels");
    fuse_cmd->add_option("--in", fuse.in, "input dataset")->required();
    fuse_cmd->add_option("--detections", fuse.detections, "detections file")->required();
    fuse_cmd->add_option("--out", fuse.out, "output dataset")->required();
    fuse_cmd->add_option("--iou-threshold", fuse.iou_threshold, "dedup IoU threshold")
        ->check(CLI::Range(0.0, 1.0));
    fuse_cmd->add_option("--class-map", fuse.class_map, "simple:complex id pairs, e.g. 0:0,1:1");
    fuse_cmd->add_option("--threads", fuse.threads, "worker threads");

    AugmentOptions aug;
    auto* aug_cmd = app.add_subcommand("augment", "zoom/shift augment a dataset");
    aug_cmd->add_option("--in", aug.in, "input dataset")->required();
    aug_cmd->add_option("--out", aug.out, "output dataset")->required();
    aug_cmd->add_option("--seed", aug.seed, "rng seed");
    aug_cmd->add_option("--scale-lower", aug.scale_lower, "zoom lower bound");
    aug_cmd->add_option("--scale-upper", aug.scale_upper, "zoom upper bound");
    aug_cmd->add_option("--shift-fraction", aug.shift_fraction,
                        "max |shift| as a fraction of image size");
    aug_cmd->add_option("--visibility", aug.visibility_threshold,
                        "min visible box-area fraction to keep an annotation");
    aug_cmd->add_option("--threads", aug.threads, "worker threads");

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "2D/BEV metrics and top-view heatmaps");
    eval_cmd->add_option("--gt", eval.gt, "ground-truth dataset")->required();
    eval_cmd->add_option("--pred", eval.pred, "prediction dataset")->required();
    eval_cmd->add_option("--out-dir", eval.out_dir, "report directory")->required();
    eval_cmd->add_option("--iou-threshold", eval.iou_threshold, "association IoU threshold")
        ->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--conf-threshold", eval.conf_threshold,
                         "operating point for reported precision/recall");
    eval_cmd->add_option("--assoc-distance", eval.heatmap.assoc_distance,
                         "heatmap association distance, meters");
    eval_cmd->add_option("--cell-lateral", eval.heatmap.cell_lateral, "heatmap cell width, meters");
    eval_cmd->add_option("--cell-longitudinal", eval.heatmap.cell_longitudinal,
                         "heatmap cell depth, meters");
    eval_cmd->add_option("--lateral-extent", eval.heatmap.lateral_extent,
                         "heatmap half-width, meters");
    eval_cmd->add_option("--lon-min", eval.heatmap.longitudinal_min, "heatmap backward range");
    eval_cmd->add_option("--lon-max", eval.heatmap.longitudinal_max, "heatmap forward range");
    eval_cmd->add_option("--threads", eval.threads, "worker threads");

    LosscheckOptions losscheck;
    auto* loss_cmd = app.add_subcommand("losscheck", "loss invariant and gradient suite");
    loss_cmd->add_option("--seed", losscheck.seed, "rng seed");
    loss_cmd->add_option("--trials", losscheck.trials, "trials per check")
        ->check(CLI::PositiveNumber);

    ReportOptions report;
    auto* report_cmd = app.add_subcommand("report", "summarize prior eval outputs");
    report_cmd->add_option("--eval-dir", report.eval_dir, "directory written by eval")->required();

    std::vector<const char*> argv;
    argv.push_back("splkit");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (synth_cmd->parsed()) return run_synth(synth);
        if (fuse_cmd->parsed()) return run_fuse(fuse);
        if (aug_cmd->parsed()) return run_augment(aug);
        if (eval_cmd->parsed()) return run_eval(eval);
        if (loss_cmd->parsed()) return run_losscheck_cmd(losscheck);
        if (report_cmd->parsed()) return run_report(report);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace splkit::cli
