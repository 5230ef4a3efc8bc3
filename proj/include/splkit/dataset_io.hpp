#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "splkit/frame.hpp"

// JSONL dataset persistence. One manifest record, then one record per frame;
// rasters live beside the file as 8-bit binary pixmaps referenced by relative
// path. The writer owns its byte format: stable key order and %.9g floats,
// so identical inputs always serialize to identical bytes.

namespace splkit {

inline constexpr int kDatasetSchemaVersion = 1;

struct CategoryInfo {
    int id = 0;
    std::string name;
    Dimensions3 prior;
};

struct ProvenanceEntry {
    std::string op;
    std::vector<std::pair<std::string, std::string>> params;  // ordered key/value
};

struct DatasetManifest {
    int schema_version = kDatasetSchemaVersion;
    long frame_count = 0;
    std::vector<CategoryInfo> categories;
    std::vector<ProvenanceEntry> provenance;
};

struct Dataset {
    DatasetManifest manifest;
    std::vector<Frame> frames;
};

namespace io_detail {

inline std::string fmt_double(double v) {
    if (!std::isfinite(v)) throw Error("refusing to serialize non-finite number");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

inline std::string json_quote(const std::string& s) { return "\"" + escape_json(s) + "\""; }

inline void append_number_array(std::string& out, std::initializer_list<double> vs) {
    out += '[';
    bool first = true;
    for (const double v : vs) {
        if (!first) out += ',';
        out += fmt_double(v);
        first = false;
    }
    out += ']';
}

inline std::string manifest_line(const DatasetManifest& m) {
    std::string out = "{\"type\":\"manifest\",\"schema_version\":";
    out += std::to_string(m.schema_version);
    out += ",\"frame_count\":" + std::to_string(m.frame_count);
    out += ",\"categories\":[";
    for (std::size_t i = 0; i < m.categories.size(); ++i) {
        const CategoryInfo& c = m.categories[i];
        if (i) out += ',';
        out += "{\"id\":" + std::to_string(c.id) + ",\"name\":" + json_quote(c.name) + ",\"prior\":";
        append_number_array(out, {c.prior.width, c.prior.height, c.prior.length});
        out += '}';
    }
    out += "],\"provenance\":[";
    for (std::size_t i = 0; i < m.provenance.size(); ++i) {
        if (i) out += ',';
        out += "{\"op\":" + json_quote(m.provenance[i].op) + ",\"params\":{";
        auto params = m.provenance[i].params;  // canonical key order, matches readback
        std::sort(params.begin(), params.end());
        for (std::size_t j = 0; j < params.size(); ++j) {
            if (j) out += ',';
            out += json_quote(params[j].first) + ":" + json_quote(params[j].second);
        }
        out += "}}";
    }
    out += "]}";
    return out;
}

inline void append_annotation(std::string& out, const Annotation& a) {
    out += "{\"category\":" + std::to_string(a.category) + ",\"box2d\":";
    append_number_array(out, {a.box2d.center_u, a.box2d.center_v, a.box2d.width, a.box2d.height});
    out += ",\"confidence\":" + fmt_double(a.confidence);
    out += ",\"is_pseudo\":";
    out += a.is_pseudo ? "true" : "false";
    out += ",\"cuboid\":";
    if (a.cuboid) {
        out += "{\"center\":";
        append_number_array(out, {a.cuboid->center.x, a.cuboid->center.y, a.cuboid->center.z});
        out += ",\"dims\":";
        append_number_array(out, {a.cuboid->dims.width, a.cuboid->dims.height, a.cuboid->dims.length});
        out += ",\"orientation\":";
        append_number_array(out, {a.cuboid->orientation.w, a.cuboid->orientation.x,
                                  a.cuboid->orientation.y, a.cuboid->orientation.z});
        out += '}';
    } else {
        out += "null";
    }
    out += '}';
}

inline std::string frame_line(const Frame& f, const std::string& raster_ref) {
    std::string out = "{\"type\":\"frame\",\"id\":" + json_quote(f.id);
    out += ",\"facing\":";
    out += f.facing == Facing::forward ? "\"forward\"" : "\"backward\"";
    out += ",\"intrinsics\":{\"fx\":" + fmt_double(f.intrinsics.fx);
    out += ",\"fy\":" + fmt_double(f.intrinsics.fy);
    out += ",\"cx\":" + fmt_double(f.intrinsics.cx);
    out += ",\"cy\":" + fmt_double(f.intrinsics.cy);
    out += ",\"width\":" + std::to_string(f.intrinsics.width);
    out += ",\"height\":" + std::to_string(f.intrinsics.height) + "}";
    out += ",\"raster\":";
    out += raster_ref.empty() ? "null" : json_quote(raster_ref);
    out += ",\"annotations\":[";
    for (std::size_t i = 0; i < f.annotations.size(); ++i) {
        if (i) out += ',';
        append_annotation(out, f.annotations[i]);
    }
    out += "]}";
    return out;
}

inline void write_ppm(const std::filesystem::path& path, const Raster& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open raster file for writing: " + path.string());
    out << "P6\n" << r.width << " " << r.height << "\n255\n";
    std::string bytes;
    bytes.reserve(r.values.size() * 3);
    for (const auto& px : r.values)
        for (int c = 0; c < 3; ++c) {
            const double v = std::clamp(px[c], 0.0, 1.0);
            bytes += static_cast<char>(static_cast<int>(std::lround(v * 255.0)));
        }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline Raster read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingRaster("raster file not found: " + path.string());
    auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                while ((c = in.get()) != EOF && c != '\n') {
                }
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) break;
                continue;
            }
            tok += static_cast<char>(c);
        }
        return tok;
    };
    if (next_token() != "P6") throw MalformedRecord("unsupported pixmap format in " + path.string());
    Raster r;
    r.width = std::stoi(next_token());
    r.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (maxval != 255) throw MalformedRecord("unsupported pixmap maxval in " + path.string());
    const std::size_t n = static_cast<std::size_t>(r.width) * r.height;
    std::string bytes(n * 3, '\0');
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size())
        throw MalformedRecord("truncated pixmap " + path.string());
    r.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c)
            r.values[i][c] = static_cast<unsigned char>(bytes[i * 3 + c]) / 255.0;
    return r;
}

inline std::string raster_dir_name(const std::filesystem::path& dataset_path) {
    return dataset_path.stem().string() + "_rasters";
}

}  // namespace io_detail

inline void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open dataset for writing: " + path.string());

    DatasetManifest manifest = dataset.manifest;
    manifest.frame_count = static_cast<long>(dataset.frames.size());
    out << io_detail::manifest_line(manifest) << "\n";

    const std::string raster_dir = io_detail::raster_dir_name(path);
    bool raster_dir_created = false;
    for (const Frame& f : dataset.frames) {
        for (const Annotation& a : f.annotations)
            if (a.is_pseudo == a.cuboid.has_value())
                throw Error("frame " + f.id + ": is_pseudo flag inconsistent with cuboid presence");
        std::string ref;
        if (f.raster) {
            if (!raster_dir_created) {
                std::filesystem::create_directories(path.parent_path() / raster_dir);
                raster_dir_created = true;
            }
            ref = raster_dir + "/" + f.id + ".ppm";
            io_detail::write_ppm(path.parent_path() / ref, *f.raster);
        }
        out << io_detail::frame_line(f, ref) << "\n";
    }
}

inline Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open dataset: " + path.string());

    Dataset ds;
    std::string line;
    long line_no = 0;
    std::map<std::string, bool> seen_ids;
    auto fail = [&](const std::string& msg) -> MalformedRecord {
        return MalformedRecord(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw fail(e.what());
        }
        try {
            const std::string type = j.at("type").get<std::string>();
            if (line_no == 1) {
                if (type != "manifest") throw fail("first record must be the manifest");
                const int version = j.at("schema_version").get<int>();
                if (version != kDatasetSchemaVersion)
                    throw SchemaMismatch(path.string() + ": unsupported schema version " +
                                         std::to_string(version));
                ds.manifest.schema_version = version;
                ds.manifest.frame_count = j.at("frame_count").get<long>();
                for (const auto& c : j.at("categories")) {
                    CategoryInfo info;
                    info.id = c.at("id").get<int>();
                    info.name = c.at("name").get<std::string>();
                    const auto& prior = c.at("prior");
                    info.prior = {prior.at(0).get<double>(), prior.at(1).get<double>(),
                                  prior.at(2).get<double>()};
                    ds.manifest.categories.push_back(info);
                }
                for (std::size_t i = 0; i < ds.manifest.categories.size(); ++i)
                    if (ds.manifest.categories[i].id != static_cast<int>(i))
                        throw fail("category ids must be dense from 0");
                if (j.contains("provenance")) {
                    for (const auto& p : j.at("provenance")) {
                        ProvenanceEntry entry;
                        entry.op = p.at("op").get<std::string>();
                        for (const auto& [key, value] : p.at("params").items())
                            entry.params.emplace_back(key, value.get<std::string>());
                        std::sort(entry.params.begin(), entry.params.end());
                        ds.manifest.provenance.push_back(entry);
                    }
                }
                continue;
            }
            if (type != "frame") throw fail("unexpected record type '" + type + "'");

            Frame f;
            f.id = j.at("id").get<std::string>();
            if (seen_ids.count(f.id)) throw fail("duplicate frame id '" + f.id + "'");
            seen_ids[f.id] = true;
            const std::string facing = j.at("facing").get<std::string>();
            if (facing == "forward")
                f.facing = Facing::forward;
            else if (facing == "backward")
                f.facing = Facing::backward;
            else
                throw fail("unknown facing '" + facing + "'");
            const auto& k = j.at("intrinsics");
            f.intrinsics = {k.at("fx").get<double>(),    k.at("fy").get<double>(),
                            k.at("cx").get<double>(),    k.at("cy").get<double>(),
                            k.at("width").get<int>(),    k.at("height").get<int>()};
            if (!j.at("raster").is_null()) {
                const std::string rel = j.at("raster").get<std::string>();
                f.raster = io_detail::read_ppm(path.parent_path() / rel);
            }
            for (const auto& a : j.at("annotations")) {
                Annotation ann;
                ann.category = a.at("category").get<int>();
                const auto& b = a.at("box2d");
                ann.box2d = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                             b.at(3).get<double>()};
                ann.confidence = a.at("confidence").get<double>();
                ann.is_pseudo = a.at("is_pseudo").get<bool>();
                if (!a.at("cuboid").is_null()) {
                    const auto& c = a.at("cuboid");
                    Cuboid3D cc;
                    const auto& ctr = c.at("center");
                    cc.center = {ctr.at(0).get<double>(), ctr.at(1).get<double>(),
                                 ctr.at(2).get<double>()};
                    const auto& dims = c.at("dims");
                    cc.dims = {dims.at(0).get<double>(), dims.at(1).get<double>(),
                               dims.at(2).get<double>()};
                    const auto& o = c.at("orientation");
                    cc.orientation = {o.at(0).get<double>(), o.at(1).get<double>(),
                                      o.at(2).get<double>(), o.at(3).get<double>()};
                    ann.cuboid = cc;
                }
                if (ann.is_pseudo == ann.cuboid.has_value())
                    throw fail("is_pseudo flag inconsistent with cuboid presence");
                f.annotations.push_back(ann);
            }
            ds.frames.push_back(std::move(f));
        } catch (const nlohmann::json::exception& e) {
            throw fail(e.what());
        }
    }
    if (line_no == 0) throw MalformedRecord(path.string() + ": empty dataset file");
    if (ds.manifest.frame_count != static_cast<long>(ds.frames.size()))
        throw MalformedRecord(path.string() + ": manifest declares " +
                              std::to_string(ds.manifest.frame_count) + " frames, found " +
                              std::to_string(ds.frames.size()));
    return ds;
}

inline constexpr int kDetectionsSchemaVersion = 1;

inline void write_detections(const std::map<std::string, std::vector<Detection2D>>& detections,
                             const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open detections file for writing: " + path.string());
    out << "{\"type\":\"detections_manifest\",\"schema_version\":" << kDetectionsSchemaVersion
        << ",\"frame_count\":" << detections.size() << "}\n";
    for (const auto& [frame_id, dets] : detections) {
        std::string line = "{\"frame_id\":" + io_detail::json_quote(frame_id) + ",\"detections\":[";
        for (std::size_t i = 0; i < dets.size(); ++i) {
            const Detection2D& d = dets[i];
            if (i) line += ',';
            line += "{\"box2d\":";
            io_detail::append_number_array(
                line, {d.box.center_u, d.box.center_v, d.box.width, d.box.height});
            line += ",\"objectness\":" + io_detail::fmt_double(d.objectness);
            line += ",\"class_probs\":[";
            for (std::size_t c = 0; c < d.class_probs.size(); ++c) {
                if (c) line += ',';
                line += io_detail::fmt_double(d.class_probs[c]);
            }
            line += "]}";
        }
        line += "]}";
        out << line << "\n";
    }
}

inline std::map<std::string, std::vector<Detection2D>> read_detections(
    const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open detections file: " + path.string());
    std::map<std::string, std::vector<Detection2D>> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecord(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        try {
            if (line_no == 1) {
                const int version = j.at("schema_version").get<int>();
                if (version != kDetectionsSchemaVersion)
                    throw SchemaMismatch(path.string() + ": unsupported schema version " +
                                         std::to_string(version));
                continue;
            }
            std::vector<Detection2D> dets;
            for (const auto& d : j.at("detections")) {
                Detection2D det;
                const auto& b = d.at("box2d");
                det.box = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                           b.at(3).get<double>()};
                det.objectness = d.at("objectness").get<double>();
                for (const auto& p : d.at("class_probs")) det.class_probs.push_back(p.get<double>());
                dets.push_back(std::move(det));
            }
            out[j.at("frame_id").get<std::string>()] = std::move(dets);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecord(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace splkit
