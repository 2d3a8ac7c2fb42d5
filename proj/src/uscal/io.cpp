#include "uscal/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "uscal/error.hpp"

namespace fs = std::filesystem;

namespace uscal {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, context + ": invalid number '" + s + "'");
    }
}

int parse_int(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, context + ": invalid integer '" + s + "'");
    }
}

// Parses "v0 v1 ... unit" requiring the trailing unit tag.
std::vector<double> parse_with_unit(const std::string& value, const std::string& unit,
                                    std::size_t count, const std::string& context) {
    const auto toks = tokens(value);
    if (toks.size() == count) {
        throw Error(ErrorCode::UnitError, context + ": missing unit tag (expected '" + unit + "')");
    }
    if (toks.size() != count + 1) {
        throw Error(ErrorCode::ParseError,
                    context + ": expected " + std::to_string(count) + " value(s) plus unit");
    }
    if (toks.back() != unit) {
        throw Error(ErrorCode::UnitError,
                    context + ": unknown unit '" + toks.back() + "' (expected '" + unit + "')");
    }
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(parse_double(toks[i], context));
    return out;
}

struct KeyValueFile {
    std::string path;
    std::vector<std::pair<std::string, std::string>> entries;  // in file order
    std::map<std::string, std::string> map;

    const std::string& require(const std::string& key) const {
        const auto it = map.find(key);
        if (it == map.end()) {
            throw Error(ErrorCode::ParseError, path + ": missing key '" + key + "'");
        }
        return it->second;
    }
    bool has(const std::string& key) const { return map.count(key) != 0; }
};

KeyValueFile read_key_value(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path);
    KeyValueFile kv;
    kv.path = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ParseError,
                        path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        kv.entries.emplace_back(key, value);
        kv.map[key] = value;
    }
    return kv;
}

std::string csv_context(const std::string& path, int lineno) {
    return path + ":" + std::to_string(lineno);
}

RigidTransform transform_from_fields(const std::vector<std::string>& f, std::size_t offset,
                                     const std::string& context) {
    RigidTransform t;
    t.rotation = UnitQuaternion(parse_double(f[offset], context), parse_double(f[offset + 1], context),
                                parse_double(f[offset + 2], context), parse_double(f[offset + 3], context));
    t.translation = {parse_double(f[offset + 4], context), parse_double(f[offset + 5], context),
                     parse_double(f[offset + 6], context)};
    return t;
}

void write_transform_fields(std::ostream& out, const RigidTransform& t) {
    out << format_double(t.rotation.w()) << "," << format_double(t.rotation.x()) << ","
        << format_double(t.rotation.y()) << "," << format_double(t.rotation.z()) << ","
        << format_double(t.translation.x()) << "," << format_double(t.translation.y()) << ","
        << format_double(t.translation.z());
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

double parse_angle(const std::string& text) {
    const auto toks = tokens(text);
    if (toks.size() != 2) {
        throw Error(ErrorCode::UnitError, "angle needs a unit tag: '" + text + "'");
    }
    const double v = parse_double(toks[0], "angle");
    if (toks[1] == "rad") return v;
    if (toks[1] == "deg") return v * M_PI / 180.0;
    throw Error(ErrorCode::UnitError, "unknown angle unit '" + toks[1] + "'");
}

double parse_length_mm(const std::string& text) {
    return parse_with_unit(text, "mm", 1, "length")[0];
}

void Dataset::validate() const {
    geometry.validate();
    phantom.validate();
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (!(frames[i - 1].frame_id < frames[i].frame_id)) {
            throw Error(ErrorCode::InvalidArgument, "frame ids must be unique and sorted");
        }
    }
    for (const auto& f : frames) {
        if (f.bscan) {
            if (f.u_px < 0 || f.v_px < 0 || f.u_px >= geometry.width || f.v_px >= geometry.height) {
                throw Error(ErrorCode::InvalidArgument,
                            "feature pixel outside image bounds in frame " +
                                std::to_string(f.frame_id));
            }
        }
    }
}

Dataset load_dataset(const std::string& path) {
    Dataset ds;
    ds.root = path;

    const KeyValueFile cfg = read_key_value((fs::path(path) / "config.txt").string());
    ds.provenance = cfg.has("provenance") ? cfg.map.at("provenance") : "external";
    ds.phantom.kind = phantom_kind_from_name(cfg.require("phantom.kind"));
    const auto box = parse_with_unit(cfg.require("phantom.container"), "mm", 3, "phantom.container");
    ds.phantom.container = {box[0], box[1], box[2]};
    if (cfg.has("phantom.hemisphere_radius")) {
        ds.phantom.hemisphere_radius =
            parse_with_unit(cfg.map.at("phantom.hemisphere_radius"), "mm", 1,
                            "phantom.hemisphere_radius")[0];
    }
    for (const auto& [key, value] : cfg.entries) {
        if (key.rfind("phantom.feature.", 0) == 0) {
            const std::string label = key.substr(std::string("phantom.feature.").size());
            const auto p = parse_with_unit(value, "mm", 3, key);
            ds.phantom.features.push_back({label, {p[0], p[1], p[2]}});
        }
    }
    ds.geometry.width =
        static_cast<int>(parse_with_unit(cfg.require("image.width"), "px", 1, "image.width")[0]);
    ds.geometry.height =
        static_cast<int>(parse_with_unit(cfg.require("image.height"), "px", 1, "image.height")[0]);
    ds.geometry.s_x =
        parse_with_unit(cfg.require("image.scale_x"), "mm_per_px", 1, "image.scale_x")[0];
    ds.geometry.s_y =
        parse_with_unit(cfg.require("image.scale_y"), "mm_per_px", 1, "image.scale_y")[0];

    // poses.csv
    const std::string poses_path = (fs::path(path) / "poses.csv").string();
    std::ifstream poses(poses_path);
    if (!poses) throw Error(ErrorCode::MissingFile, "cannot open " + poses_path);
    std::map<int, std::pair<RigidTransform, RigidTransform>> pose_map;
    std::string line;
    int lineno = 0;
    while (std::getline(poses, line)) {
        ++lineno;
        if (lineno == 1 || trim(line).empty()) continue;  // header
        const auto f = split(trim(line), ',');
        const std::string ctx = csv_context(poses_path, lineno);
        if (f.size() != 15) {
            throw Error(ErrorCode::ParseError, ctx + ": expected 15 fields, got " +
                                                   std::to_string(f.size()));
        }
        const int id = parse_int(f[0], ctx);
        if (pose_map.count(id)) {
            throw Error(ErrorCode::ParseError, ctx + ": duplicate frame id " + std::to_string(id));
        }
        pose_map[id] = {transform_from_fields(f, 1, ctx), transform_from_fields(f, 8, ctx)};
    }

    // features.csv
    const std::string feat_path = (fs::path(path) / "features.csv").string();
    std::ifstream feats(feat_path);
    if (!feats) throw Error(ErrorCode::MissingFile, "cannot open " + feat_path);
    std::map<int, std::pair<double, double>> feat_map;
    lineno = 0;
    while (std::getline(feats, line)) {
        ++lineno;
        if (lineno == 1 || trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        const std::string ctx = csv_context(feat_path, lineno);
        if (f.size() != 3) {
            throw Error(ErrorCode::ParseError, ctx + ": expected 3 fields, got " +
                                                   std::to_string(f.size()));
        }
        const int id = parse_int(f[0], ctx);
        feat_map[id] = {parse_double(f[1], ctx), parse_double(f[2], ctx)};
    }

    for (const auto& [id, tf] : pose_map) {
        const auto fit = feat_map.find(id);
        if (fit == feat_map.end()) {
            throw Error(ErrorCode::ParseError,
                        feat_path + ": no feature for frame " + std::to_string(id));
        }
        FrameObservation obs;
        obs.frame_id = id;
        obs.t_mc = tf.first;
        obs.t_pc = tf.second;
        obs.u_px = fit->second.first;
        obs.v_px = fit->second.second;
        const fs::path img_path = fs::path(path) / "images" / (std::to_string(id) + ".pgm");
        if (fs::exists(img_path)) {
            obs.bscan = read_pgm(img_path.string(), ds.geometry.s_x, ds.geometry.s_y);
            if (obs.bscan->geometry.width != ds.geometry.width ||
                obs.bscan->geometry.height != ds.geometry.height) {
                throw Error(ErrorCode::ParseError,
                            img_path.string() + ": image size disagrees with config.txt");
            }
        }
        ds.frames.push_back(std::move(obs));
    }

    ds.validate();
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    ds.validate();
    fs::create_directories(path);

    {
        std::ofstream cfg(fs::path(path) / "config.txt");
        if (!cfg) throw Error(ErrorCode::IoError, "cannot write config.txt under " + path);
        cfg << "provenance = " << ds.provenance << "\n";
        cfg << "phantom.kind = " << phantom_kind_name(ds.phantom.kind) << "\n";
        if (ds.phantom.hemisphere_radius > 0.0) {
            cfg << "phantom.hemisphere_radius = " << format_double(ds.phantom.hemisphere_radius)
                << " mm\n";
        }
        cfg << "phantom.container = " << format_double(ds.phantom.container.x()) << " "
            << format_double(ds.phantom.container.y()) << " "
            << format_double(ds.phantom.container.z()) << " mm\n";
        for (const auto& f : ds.phantom.features) {
            cfg << "phantom.feature." << f.label << " = " << format_double(f.position.x()) << " "
                << format_double(f.position.y()) << " " << format_double(f.position.z())
                << " mm\n";
        }
        cfg << "image.width = " << ds.geometry.width << " px\n";
        cfg << "image.height = " << ds.geometry.height << " px\n";
        cfg << "image.scale_x = " << format_double(ds.geometry.s_x) << " mm_per_px\n";
        cfg << "image.scale_y = " << format_double(ds.geometry.s_y) << " mm_per_px\n";
    }

    {
        std::ofstream poses(fs::path(path) / "poses.csv");
        poses << "frame_id,qw_mc,qx_mc,qy_mc,qz_mc,tx_mm_mc,ty_mm_mc,tz_mm_mc,"
                 "qw_pc,qx_pc,qy_pc,qz_pc,tx_mm_pc,ty_mm_pc,tz_mm_pc\n";
        for (const auto& f : ds.frames) {
            poses << f.frame_id << ",";
            write_transform_fields(poses, f.t_mc);
            poses << ",";
            write_transform_fields(poses, f.t_pc);
            poses << "\n";
        }
    }

    {
        std::ofstream feats(fs::path(path) / "features.csv");
        feats << "frame_id,u_px,v_px\n";
        for (const auto& f : ds.frames) {
            feats << f.frame_id << "," << format_double(f.u_px) << "," << format_double(f.v_px)
                  << "\n";
        }
    }

    bool any_image = false;
    for (const auto& f : ds.frames) any_image |= f.bscan.has_value();
    if (any_image) {
        fs::create_directories(fs::path(path) / "images");
        for (const auto& f : ds.frames) {
            if (f.bscan) {
                write_pgm(*f.bscan,
                          (fs::path(path) / "images" / (std::to_string(f.frame_id) + ".pgm"))
                              .string());
            }
        }
    }
}

void save_calibration_result(const CalibrationResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << "mode = " << (result.mode == AlignMode::Rigid ? "rigid" : "similarity") << "\n";
    out << "quaternion = " << format_double(result.t_um.rotation.w()) << " "
        << format_double(result.t_um.rotation.x()) << " "
        << format_double(result.t_um.rotation.y()) << " "
        << format_double(result.t_um.rotation.z()) << "\n";
    out << "translation = " << format_double(result.t_um.translation.x()) << " "
        << format_double(result.t_um.translation.y()) << " "
        << format_double(result.t_um.translation.z()) << " mm\n";
    out << "scale = " << format_double(result.t_um.scale) << "\n";
    const auto axis_line = [&](const char* name, const Eigen::Vector3d& v) {
        out << name << " = " << format_double(v.x()) << " " << format_double(v.y()) << " "
            << format_double(v.z()) << " mm\n";
    };
    axis_line("bre.mean", result.stats.mean);
    axis_line("bre.stddev", result.stats.stddev);
    axis_line("bre.min", result.stats.min);
    axis_line("bre.max", result.stats.max);
    out << "frames_used = " << result.frames_used.size() << "\n";
    out << "\n";
    out << "frame_id,abs_dx_mm,abs_dy_mm,abs_dz_mm\n";
    for (const auto& f : result.per_frame_bre) {
        out << f.frame_id << "," << format_double(f.abs_error.x()) << ","
            << format_double(f.abs_error.y()) << "," << format_double(f.abs_error.z()) << "\n";
    }
}

void save_noise_study_csv(const std::vector<NoiseStudyRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << "sigma,residual_std,trials\n";
    for (const auto& r : rows) {
        out << format_double(r.sigma) << "," << format_double(r.residual_std) << "," << r.trials
            << "\n";
    }
}

CameraIntrinsics load_intrinsics(const std::string& path) {
    const KeyValueFile kv = read_key_value(path);
    CameraIntrinsics intr;
    intr.f_x = parse_double(kv.require("fx"), path + ": fx");
    intr.f_y = parse_double(kv.require("fy"), path + ": fy");
    intr.c_x = parse_double(kv.require("cx"), path + ": cx");
    intr.c_y = parse_double(kv.require("cy"), path + ": cy");
    intr.validate();
    return intr;
}

PlanarTarget load_planar_target(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path);
    std::map<int, Point3> pts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        const std::string ctx = csv_context(path, lineno);
        if (f.size() != 3) {
            throw Error(ErrorCode::ParseError, ctx + ": expected 3 fields");
        }
        pts[parse_int(f[0], ctx)] = {parse_double(f[1], ctx), parse_double(f[2], ctx), 0.0};
    }
    PlanarTarget t;
    t.layout = fs::path(path).stem().string();
    for (const auto& [idx, p] : pts) t.points.push_back(p);
    t.validate();
    return t;
}

std::vector<CornerObservation> load_corner_observations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path);
    std::vector<CornerObservation> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        const std::string ctx = csv_context(path, lineno);
        if (f.size() != 4) {
            throw Error(ErrorCode::ParseError, ctx + ": expected 4 fields");
        }
        out.push_back({parse_int(f[0], ctx), parse_int(f[1], ctx), parse_double(f[2], ctx),
                       parse_double(f[3], ctx)});
    }
    return out;
}

}  // namespace uscal
