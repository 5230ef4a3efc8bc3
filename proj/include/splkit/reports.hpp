#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "splkit/dataset_io.hpp"
#include "splkit/eval.hpp"

// Report emission: metric tables as CSV, heatmaps as CSV grids and binary
// pixmaps. The heatmap color ramp is red (0) -> yellow (0.5) -> green (1);
// cells with no defined value are gray, the ego cell is white.

namespace splkit {

struct MetricsRow {
    std::string scope;  // "overall" or a category name
    std::string space;  // "image" or "bev"
    double auc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long n_gt = 0;
    long n_pred = 0;
    bool degenerate = false;
};

namespace report_detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open report file for writing: " + path.string());
    return out;
}

}  // namespace report_detail

inline void write_metrics_csv(const std::filesystem::path& path,
                              const std::vector<MetricsRow>& rows) {
    auto out = report_detail::open_out(path);
    out << "scope,space,auc,precision,recall,tp,fp,fn,n_gt,n_pred,degenerate\n";
    for (const MetricsRow& r : rows) {
        out << r.scope << ',' << r.space << ',' << io_detail::fmt_double(r.auc) << ','
            << io_detail::fmt_double(r.precision) << ',' << io_detail::fmt_double(r.recall) << ','
            << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.n_gt << ',' << r.n_pred << ','
            << (r.degenerate ? 1 : 0) << "\n";
    }
}

inline void write_pr_csv(const std::filesystem::path& path, const PRCurve& curve) {
    auto out = report_detail::open_out(path);
    out << "threshold,precision,recall,tp,fp,fn\n";
    for (const PRPoint& p : curve.points) {
        out << io_detail::fmt_double(p.threshold) << ',' << io_detail::fmt_double(p.precision)
            << ',' << io_detail::fmt_double(p.recall) << ',' << p.tp << ',' << p.fp << ',' << p.fn
            << "\n";
    }
}

enum class HeatmapKind { precision, recall };

// CSV grid: rows from far forward (top) to far backward, columns from left
// (-lateral) to right (+lateral); undefined cells are empty fields.
inline void write_heatmap_csv(const std::filesystem::path& path, const HeatmapGrid& grid,
                              HeatmapKind kind) {
    auto out = report_detail::open_out(path);
    out << "longitudinal_m";
    for (int c = 0; c < grid.cols; ++c) {
        const double x0 = -grid.config.lateral_extent + c * grid.config.cell_lateral;
        out << ",x" << io_detail::fmt_double(x0) << ".." << io_detail::fmt_double(x0 + grid.config.cell_lateral);
    }
    out << "\n";
    for (int display = 0; display < grid.rows; ++display) {
        const int r = grid.rows - 1 - display;
        const double z0 = grid.config.longitudinal_min + r * grid.config.cell_longitudinal;
        out << io_detail::fmt_double(z0) << ".." << io_detail::fmt_double(z0 + grid.config.cell_longitudinal);
        for (int c = 0; c < grid.cols; ++c) {
            const HeatmapCell& cell = grid.cell(r, c);
            out << ',';
            if (kind == HeatmapKind::precision && cell.has_precision())
                out << io_detail::fmt_double(cell.precision());
            else if (kind == HeatmapKind::recall && cell.has_recall())
                out << io_detail::fmt_double(cell.recall());
        }
        out << "\n";
    }
}

inline void write_heatmap_counts_csv(const std::filesystem::path& path, const HeatmapGrid& grid) {
    auto out = report_detail::open_out(path);
    out << "row,col,lateral_min_m,longitudinal_min_m,tp_recall,tp_precision,fp,fn,ego\n";
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            const HeatmapCell& cell = grid.cell(r, c);
            out << r << ',' << c << ','
                << io_detail::fmt_double(-grid.config.lateral_extent + c * grid.config.cell_lateral)
                << ','
                << io_detail::fmt_double(grid.config.longitudinal_min +
                                         r * grid.config.cell_longitudinal)
                << ',' << cell.tp_recall << ',' << cell.tp_precision << ',' << cell.fp << ','
                << cell.fn << ',' << (cell.ego ? 1 : 0) << "\n";
        }
    }
}

inline void write_heatmap_summary_csv(const std::filesystem::path& path, const HeatmapGrid& grid) {
    auto out = report_detail::open_out(path);
    out << "total_precision,total_recall,overflow_tp,overflow_fp,overflow_fn\n";
    out << io_detail::fmt_double(grid.total_precision) << ','
        << io_detail::fmt_double(grid.total_recall) << ',' << grid.overflow_tp << ','
        << grid.overflow_fp << ',' << grid.overflow_fn << "\n";
}

inline std::array<unsigned char, 3> heatmap_color(double v) {
    if (v < 0.5) {
        const int g = static_cast<int>(std::lround(510.0 * v));
        return {255, static_cast<unsigned char>(std::clamp(g, 0, 255)), 0};
    }
    const int r = static_cast<int>(std::lround(510.0 * (1.0 - v)));
    return {static_cast<unsigned char>(std::clamp(r, 0, 255)), 255, 0};
}

inline void write_heatmap_ppm(const std::filesystem::path& path, const HeatmapGrid& grid,
                              HeatmapKind kind, int cell_pixels = 16) {
    auto out = report_detail::open_out(path);
    const int w = grid.cols * cell_pixels;
    const int h = grid.rows * cell_pixels;
    out << "P6\n" << w << " " << h << "\n255\n";
    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y) {
        const int r = grid.rows - 1 - y / cell_pixels;  // top row = far forward
        for (int x = 0; x < w; ++x) {
            const int c = x / cell_pixels;
            const HeatmapCell& cell = grid.cell(r, c);
            std::array<unsigned char, 3> rgb{120, 120, 120};
            if (cell.ego) {
                rgb = {255, 255, 255};
            } else if (kind == HeatmapKind::precision && cell.has_precision()) {
                rgb = heatmap_color(cell.precision());
            } else if (kind == HeatmapKind::recall && cell.has_recall()) {
                rgb = heatmap_color(cell.recall());
            }
            bytes += static_cast<char>(rgb[0]);
            bytes += static_cast<char>(rgb[1]);
            bytes += static_cast<char>(rgb[2]);
        }
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace splkit
