#include "uscal.h"

#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "uscal/calibrate.hpp"
#include "uscal/detect.hpp"
#include "uscal/error.hpp"
#include "uscal/io.hpp"
#include "uscal/planar_pose.hpp"
#include "uscal/synthetic.hpp"

namespace {

thread_local std::string g_last_error;

int status_from_code(uscal::ErrorCode code) {
    using uscal::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument: return USCAL_E_INVALID_ARGUMENT;
        case ErrorCode::ParseError: return USCAL_E_PARSE;
        case ErrorCode::MissingFile: return USCAL_E_MISSING_FILE;
        case ErrorCode::UnitError: return USCAL_E_UNIT;
        case ErrorCode::IoError: return USCAL_E_IO;
        case ErrorCode::DegenerateInput: return USCAL_E_DEGENERATE_INPUT;
        case ErrorCode::NumericalFailure: return USCAL_E_NUMERICAL_FAILURE;
        case ErrorCode::NoCircleFound: return USCAL_E_NO_CIRCLE_FOUND;
        case ErrorCode::AmbiguousPeak: return USCAL_E_AMBIGUOUS_PEAK;
        case ErrorCode::NoIntersection: return USCAL_E_NO_INTERSECTION;
        case ErrorCode::UnknownLabel: return USCAL_E_UNKNOWN_LABEL;
        case ErrorCode::BehindCamera: return USCAL_E_BEHIND_CAMERA;
        case ErrorCode::DegenerateTarget: return USCAL_E_DEGENERATE_TARGET;
        case ErrorCode::DivergedRefinement: return USCAL_E_DIVERGED_REFINEMENT;
        case ErrorCode::TooFewInliers: return USCAL_E_TOO_FEW_INLIERS;
    }
    return USCAL_E_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return USCAL_OK;
    } catch (const uscal::Error& e) {
        g_last_error = e.what();
        return status_from_code(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return USCAL_E_INTERNAL;
    }
}

uscal_transform to_c(const uscal::RigidTransform& t) {
    return {t.rotation.w(), t.rotation.x(), t.rotation.y(), t.rotation.z(),
            t.translation.x(), t.translation.y(), t.translation.z(), t.scale};
}

uscal::RigidTransform from_c(const uscal_transform& t) {
    uscal::RigidTransform out;
    out.rotation = uscal::UnitQuaternion(t.qw, t.qx, t.qy, t.qz);
    out.translation = {t.tx, t.ty, t.tz};
    out.scale = t.scale;
    return out;
}

uscal::AlignMode mode_from_int(int mode) {
    if (mode == USCAL_MODE_RIGID) return uscal::AlignMode::Rigid;
    if (mode == USCAL_MODE_SIMILARITY) return uscal::AlignMode::Similarity;
    throw uscal::Error(uscal::ErrorCode::InvalidArgument, "mode must be rigid (0) or similarity (1)");
}

uscal::SyntheticConfig config_from_c(const uscal_generate_config& c) {
    uscal::SyntheticConfig cfg;
    cfg.n_frames = c.n_frames;
    cfg.seed = c.seed;
    cfg.rot_x = {c.rot_x_min_rad, c.rot_x_max_rad};
    cfg.rot_y = {c.rot_y_min_rad, c.rot_y_max_rad};
    cfg.rot_z = c.rot_z_rad;
    cfg.image_x_mm = {c.image_x_min_mm, c.image_x_max_mm};
    cfg.image_y_mm = {c.image_y_min_mm, c.image_y_max_mm};
    cfg.noise = {c.sigma_t_mm, c.sigma_rot_rad, c.sigma_px};
    cfg.t_um_true = from_c(c.t_um_true);
    cfg.t_pc_true = from_c(c.t_pc_true);
    cfg.phantom.kind = uscal::PhantomKind::Hemisphere;
    cfg.phantom.features = {{"0", {c.feature_mm[0], c.feature_mm[1], c.feature_mm[2]}}};
    cfg.phantom.hemisphere_radius = c.hemisphere_radius_mm;
    cfg.phantom.container = {c.container_mm[0], c.container_mm[1], c.container_mm[2]};
    cfg.geometry = {c.image_width_px, c.image_height_px, c.scale_x_mm_per_px, c.scale_y_mm_per_px};
    return cfg;
}

void require(bool ok, const char* what) {
    if (!ok) throw uscal::Error(uscal::ErrorCode::InvalidArgument, what);
}

}  // namespace

struct uscal_dataset {
    uscal::Dataset ds;
};

struct uscal_result {
    uscal::CalibrationResult result;
};

extern "C" {

const char* uscal_last_error(void) { return g_last_error.c_str(); }

const char* uscal_status_name(int status) {
    switch (status) {
        case USCAL_OK: return "OK";
        case USCAL_E_INVALID_ARGUMENT: return "E_INVALID_ARGUMENT";
        case USCAL_E_PARSE: return "E_PARSE";
        case USCAL_E_MISSING_FILE: return "E_MISSING_FILE";
        case USCAL_E_UNIT: return "E_UNIT";
        case USCAL_E_IO: return "E_IO";
        case USCAL_E_DEGENERATE_INPUT: return "E_DEGENERATE_INPUT";
        case USCAL_E_NUMERICAL_FAILURE: return "E_NUMERICAL_FAILURE";
        case USCAL_E_NO_CIRCLE_FOUND: return "E_NO_CIRCLE_FOUND";
        case USCAL_E_AMBIGUOUS_PEAK: return "E_AMBIGUOUS_PEAK";
        case USCAL_E_NO_INTERSECTION: return "E_NO_INTERSECTION";
        case USCAL_E_UNKNOWN_LABEL: return "E_UNKNOWN_LABEL";
        case USCAL_E_BEHIND_CAMERA: return "E_BEHIND_CAMERA";
        case USCAL_E_DEGENERATE_TARGET: return "E_DEGENERATE_TARGET";
        case USCAL_E_DIVERGED_REFINEMENT: return "E_DIVERGED_REFINEMENT";
        case USCAL_E_TOO_FEW_INLIERS: return "E_TOO_FEW_INLIERS";
        default: return "E_INTERNAL";
    }
}

const char* uscal_version(void) { return "0.1.0"; }

int uscal_dataset_load(const char* path, uscal_dataset** out) {
    return guarded([&] {
        require(path && out, "path and out must be non-null");
        auto* handle = new uscal_dataset{uscal::load_dataset(path)};
        *out = handle;
    });
}

int uscal_dataset_save(const uscal_dataset* ds, const char* path) {
    return guarded([&] {
        require(ds && path, "dataset and path must be non-null");
        uscal::save_dataset(ds->ds, path);
    });
}

int uscal_dataset_frame_count(const uscal_dataset* ds) {
    return ds ? static_cast<int>(ds->ds.frames.size()) : -1;
}

void uscal_dataset_free(uscal_dataset* ds) { delete ds; }

int uscal_generate_config_defaults(uscal_generate_config* cfg) {
    return guarded([&] {
        require(cfg != nullptr, "cfg must be non-null");
        const uscal::SyntheticConfig d = uscal::SyntheticConfig::defaults();
        std::memset(cfg, 0, sizeof(*cfg));
        cfg->n_frames = d.n_frames;
        cfg->seed = d.seed;
        cfg->rot_x_min_rad = d.rot_x.min;
        cfg->rot_x_max_rad = d.rot_x.max;
        cfg->rot_y_min_rad = d.rot_y.min;
        cfg->rot_y_max_rad = d.rot_y.max;
        cfg->rot_z_rad = d.rot_z;
        cfg->image_x_min_mm = d.image_x_mm.min;
        cfg->image_x_max_mm = d.image_x_mm.max;
        cfg->image_y_min_mm = d.image_y_mm.min;
        cfg->image_y_max_mm = d.image_y_mm.max;
        cfg->t_um_true = to_c(d.t_um_true);
        cfg->t_pc_true = to_c(d.t_pc_true);
        const auto& f = d.phantom.features.front().position;
        cfg->feature_mm[0] = f.x();
        cfg->feature_mm[1] = f.y();
        cfg->feature_mm[2] = f.z();
        cfg->hemisphere_radius_mm = d.phantom.hemisphere_radius;
        cfg->container_mm[0] = d.phantom.container.x();
        cfg->container_mm[1] = d.phantom.container.y();
        cfg->container_mm[2] = d.phantom.container.z();
        cfg->image_width_px = d.geometry.width;
        cfg->image_height_px = d.geometry.height;
        cfg->scale_x_mm_per_px = d.geometry.s_x;
        cfg->scale_y_mm_per_px = d.geometry.s_y;
    });
}

int uscal_generate(const uscal_generate_config* cfg, uscal_dataset** out) {
    return guarded([&] {
        require(cfg && out, "cfg and out must be non-null");
        const uscal::SyntheticConfig c = config_from_c(*cfg);
        auto frames = uscal::generate_poses(c);
        if (cfg->render_images) {
            uscal::RenderOptions opts;
            opts.artifacts = static_cast<uscal::RenderArtifacts>(cfg->artifacts);
            for (auto& f : frames) {
                opts.seed = cfg->seed ^ (static_cast<std::uint64_t>(f.frame_id) + 1);
                f.bscan = uscal::render_bscan(c.phantom, f, c.t_um_true, c.geometry, opts);
            }
        }
        auto* handle = new uscal_dataset;
        handle->ds.phantom = c.phantom;
        handle->ds.geometry = c.geometry;
        handle->ds.frames = std::move(frames);
        handle->ds.provenance = "synthetic";
        *out = handle;
    });
}

int uscal_noise_study(const uscal_generate_config* cfg, const double* sigmas, int n_sigmas,
                      int trials, double* residual_std_out, const char* csv_path) {
    return guarded([&] {
        require(cfg && sigmas && n_sigmas > 0, "cfg and sigmas must be non-null");
        const uscal::SyntheticConfig c = config_from_c(*cfg);
        const std::vector<double> sv(sigmas, sigmas + n_sigmas);
        const auto rows = uscal::noise_study(c, sv, trials);
        if (residual_std_out) {
            for (int i = 0; i < n_sigmas; ++i) residual_std_out[i] = rows[i].residual_std;
        }
        if (csv_path) uscal::save_noise_study_csv(rows, csv_path);
    });
}

int uscal_calibrate(const uscal_dataset* ds, int mode, uscal_result** out) {
    return guarded([&] {
        require(ds && out, "dataset and out must be non-null");
        auto* handle = new uscal_result{
            uscal::calibrate(ds->ds.frames, ds->ds.phantom, ds->ds.geometry, mode_from_int(mode))};
        *out = handle;
    });
}

int uscal_evaluate(const uscal_dataset* ds, int mode, double threshold_mm, uscal_result** out) {
    return guarded([&] {
        require(ds && out, "dataset and out must be non-null");
        uscal::CalibrationResult r =
            uscal::calibrate(ds->ds.frames, ds->ds.phantom, ds->ds.geometry, mode_from_int(mode));
        if (threshold_mm > 0.0) {
            r = uscal::filter_and_recalibrate(r, ds->ds.frames, ds->ds.phantom, ds->ds.geometry,
                                              threshold_mm);
        }
        *out = new uscal_result{std::move(r)};
    });
}

int uscal_result_transform(const uscal_result* r, uscal_transform* out) {
    return guarded([&] {
        require(r && out, "result and out must be non-null");
        *out = to_c(r->result.t_um);
    });
}

int uscal_result_frame_count(const uscal_result* r) {
    return r ? static_cast<int>(r->result.per_frame_bre.size()) : -1;
}

int uscal_result_frame_bre(const uscal_result* r, int index, int* frame_id, double bre_mm[3]) {
    return guarded([&] {
        require(r != nullptr, "result must be non-null");
        require(index >= 0 && index < static_cast<int>(r->result.per_frame_bre.size()),
                "frame index out of range");
        const auto& f = r->result.per_frame_bre[static_cast<std::size_t>(index)];
        if (frame_id) *frame_id = f.frame_id;
        if (bre_mm) {
            bre_mm[0] = f.abs_error.x();
            bre_mm[1] = f.abs_error.y();
            bre_mm[2] = f.abs_error.z();
        }
    });
}

int uscal_result_stats(const uscal_result* r, double mean_mm[3], double stddev_mm[3],
                       double min_mm[3], double max_mm[3]) {
    return guarded([&] {
        require(r != nullptr, "result must be non-null");
        const auto copy3 = [](double* dst, const Eigen::Vector3d& src) {
            if (dst) {
                dst[0] = src.x();
                dst[1] = src.y();
                dst[2] = src.z();
            }
        };
        copy3(mean_mm, r->result.stats.mean);
        copy3(stddev_mm, r->result.stats.stddev);
        copy3(min_mm, r->result.stats.min);
        copy3(max_mm, r->result.stats.max);
    });
}

int uscal_result_save(const uscal_result* r, const char* path) {
    return guarded([&] {
        require(r && path, "result and path must be non-null");
        uscal::save_calibration_result(r->result, path);
    });
}

void uscal_result_free(uscal_result* r) { delete r; }

int uscal_cross_check(const uscal_dataset* ds, int mode, uscal_transform* horn,
                      uscal_transform* svd, double* rms_horn_mm, double* rms_svd_mm) {
    return guarded([&] {
        require(ds != nullptr, "dataset must be non-null");
        const uscal::CorrespondenceSet set =
            uscal::build_correspondences(ds->ds.frames, ds->ds.phantom, ds->ds.geometry);
        const auto m = mode_from_int(mode);
        const auto h = uscal::solve_horn(set, m);
        const auto s = uscal::solve_svd_oracle(set, m);
        if (horn) *horn = to_c(h.transform);
        if (svd) *svd = to_c(s.transform);
        if (rms_horn_mm) *rms_horn_mm = h.rms_residual;
        if (rms_svd_mm) *rms_svd_mm = s.rms_residual;
    });
}

int uscal_detect_circle(const unsigned char* pixels, int width, int height, double r_min_px,
                        double r_max_px, double* center_u, double* center_v, double* radius_px,
                        double* score) {
    return guarded([&] {
        require(pixels != nullptr, "pixels must be non-null");
        uscal::BScanImage img({width, height, 1.0, 1.0});
        std::memcpy(img.pixels.data(), pixels, img.pixels.size());
        const auto det = uscal::detect_circle(img, r_min_px, r_max_px);
        if (center_u) *center_u = det.center_u;
        if (center_v) *center_v = det.center_v;
        if (radius_px) *radius_px = det.radius_px;
        if (score) *score = det.score;
    });
}

int uscal_detect_circle_pgm(const char* path, double r_min_px, double r_max_px, double* center_u,
                            double* center_v, double* radius_px, double* score) {
    return guarded([&] {
        require(path != nullptr, "path must be non-null");
        const uscal::BScanImage img = uscal::read_pgm(path);
        const auto det = uscal::detect_circle(img, r_min_px, r_max_px);
        if (center_u) *center_u = det.center_u;
        if (center_v) *center_v = det.center_v;
        if (radius_px) *radius_px = det.radius_px;
        if (score) *score = det.score;
    });
}

int uscal_estimate_planar_pose(const double intrinsics[4], const double* target_xy_mm,
                               int n_points, const double* observations_uv_px,
                               uscal_transform* pose, double* rms_px, int* iterations) {
    return guarded([&] {
        require(intrinsics && target_xy_mm && observations_uv_px && n_points >= 4,
                "need intrinsics, at least 4 target points, and observations");
        uscal::CameraIntrinsics intr{intrinsics[0], intrinsics[1], intrinsics[2], intrinsics[3]};
        uscal::PlanarTarget target;
        std::vector<uscal::Pixel> obs;
        for (int i = 0; i < n_points; ++i) {
            target.points.emplace_back(target_xy_mm[2 * i], target_xy_mm[2 * i + 1], 0.0);
            obs.emplace_back(observations_uv_px[2 * i], observations_uv_px[2 * i + 1]);
        }
        const auto est = uscal::estimate_pose(intr, target, obs);
        if (pose) *pose = to_c(est.pose);
        if (rms_px) *rms_px = est.rms_reprojection;
        if (iterations) *iterations = est.iterations;
    });
}

int uscal_estimate_planar_pose_files(const char* intrinsics_path, const char* target_path,
                                     const char* corners_path, const char* out_csv) {
    return guarded([&] {
        require(intrinsics_path && target_path && corners_path && out_csv,
                "all file paths must be non-null");
        const auto intr = uscal::load_intrinsics(intrinsics_path);
        const auto target = uscal::load_planar_target(target_path);
        const auto corners = uscal::load_corner_observations(corners_path);

        std::map<int, std::map<int, uscal::Pixel>> by_frame;
        for (const auto& c : corners) {
            by_frame[c.frame_id][c.point_index] = {c.u, c.v};
        }
        std::ofstream out(out_csv);
        if (!out) throw uscal::Error(uscal::ErrorCode::IoError, std::string("cannot write ") + out_csv);
        out << "frame_id,qw,qx,qy,qz,tx_mm,ty_mm,tz_mm,rms_px,iterations\n";
        for (const auto& [frame_id, pts] : by_frame) {
            if (pts.size() != target.points.size()) {
                throw uscal::Error(uscal::ErrorCode::InvalidArgument,
                                   "frame " + std::to_string(frame_id) +
                                       ": corner count does not match the target");
            }
            std::vector<uscal::Pixel> obs;
            obs.reserve(pts.size());
            for (const auto& [idx, px] : pts) obs.push_back(px);
            const auto est = uscal::estimate_pose(intr, target, obs);
            out << frame_id << "," << uscal::format_double(est.pose.rotation.w()) << ","
                << uscal::format_double(est.pose.rotation.x()) << ","
                << uscal::format_double(est.pose.rotation.y()) << ","
                << uscal::format_double(est.pose.rotation.z()) << ","
                << uscal::format_double(est.pose.translation.x()) << ","
                << uscal::format_double(est.pose.translation.y()) << ","
                << uscal::format_double(est.pose.translation.z()) << ","
                << uscal::format_double(est.rms_reprojection) << "," << est.iterations << "\n";
        }
    });
}

}  // extern "C"
