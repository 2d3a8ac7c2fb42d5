// uscal command line: synthetic acquisition generation, probe calibration,
// BRE evaluation, B-scan circle detection, noise studies, planar pose
// estimation, and the Horn-vs-SVD cross-check. Talks to the core through the
// C API only.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uscal.h"

namespace {

// Exit code 1 for user errors, 2 for numerical/detection failures.
int exit_code_for(int status) {
    switch (status) {
        case USCAL_OK:
            return 0;
        case USCAL_E_INVALID_ARGUMENT:
        case USCAL_E_PARSE:
        case USCAL_E_MISSING_FILE:
        case USCAL_E_UNIT:
        case USCAL_E_IO:
            return 1;
        default:
            return 2;
    }
}

[[noreturn]] void fail(int status) {
    std::fprintf(stderr, "%s: %s\n", uscal_status_name(status), uscal_last_error());
    std::exit(exit_code_for(status));
}

void check(int status) {
    if (status != USCAL_OK) fail(status);
}

// "0.3 rad" or "17.2 deg"
double parse_angle_arg(const std::string& text) {
    double value = 0.0;
    char unit[8] = {0};
    if (std::sscanf(text.c_str(), "%lf %7s", &value, unit) != 2) {
        std::fprintf(stderr, "E_UNIT: angle needs a unit tag, e.g. '0.3 rad' or '17 deg': '%s'\n",
                     text.c_str());
        std::exit(1);
    }
    const std::string u = unit;
    if (u == "rad") return value;
    if (u == "deg") return value * M_PI / 180.0;
    std::fprintf(stderr, "E_UNIT: unknown angle unit '%s'\n", unit);
    std::exit(1);
}

void print_transform(const uscal_transform& t) {
    std::printf("quaternion %.17g %.17g %.17g %.17g\n", t.qw, t.qx, t.qy, t.qz);
    std::printf("translation %.17g %.17g %.17g mm\n", t.tx, t.ty, t.tz);
    std::printf("scale %.17g\n", t.scale);
}

int mode_from_string(const std::string& mode) {
    return mode == "similarity" ? USCAL_MODE_SIMILARITY : USCAL_MODE_RIGID;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Freehand ultrasound probe calibration toolkit"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a synthetic acquisition dataset");
    std::string gen_out;
    int gen_frames = 20;
    std::uint64_t gen_seed = 1;
    double sigma_t = 0.0, sigma_px = 0.0;
    std::string sigma_rot = "0 rad";
    std::string rot_x_min = "-0.3 rad", rot_x_max = "0.3 rad";
    std::string rot_y_min = "-0.3 rad", rot_y_max = "0.3 rad";
    bool render = false;
    std::string artifacts = "none";
    gen->add_option("--out", gen_out, "Output dataset directory")->required();
    gen->add_option("--frames", gen_frames, "Number of frames");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--sigma-t", sigma_t, "Marker translation noise std [mm]");
    gen->add_option("--sigma-rot", sigma_rot, "Marker rotation noise std, e.g. '0.01 rad'");
    gen->add_option("--sigma-px", sigma_px, "Feature pixel noise std [px]");
    gen->add_option("--rot-x-min", rot_x_min, "Probe sweep minimum about x, e.g. '-17 deg'");
    gen->add_option("--rot-x-max", rot_x_max, "Probe sweep maximum about x");
    gen->add_option("--rot-y-min", rot_y_min, "Probe sweep minimum about y");
    gen->add_option("--rot-y-max", rot_y_max, "Probe sweep maximum about y");
    gen->add_flag("--render", render, "Render B-scan images into the dataset");
    gen->add_option("--artifacts", artifacts, "Renderer artifacts: none|speckle|speckle+walls")
        ->check(CLI::IsMember({"none", "speckle", "speckle+walls"}));

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Estimate the image-to-marker transform");
    std::string cal_dataset, cal_mode = "rigid", cal_out;
    cal->add_option("--dataset", cal_dataset, "Dataset directory")->required();
    cal->add_option("--mode", cal_mode, "rigid|similarity")
        ->check(CLI::IsMember({"rigid", "similarity"}));
    cal->add_option("--out", cal_out, "Write the calibration result file here");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "BRE report with optional outlier filtering");
    std::string eval_dataset, eval_mode = "rigid", eval_out;
    double eval_threshold = 0.0;
    eval->add_option("--dataset", eval_dataset, "Dataset directory")->required();
    eval->add_option("--mode", eval_mode, "rigid|similarity")
        ->check(CLI::IsMember({"rigid", "similarity"}));
    eval->add_option("--threshold", eval_threshold, "Drop frames with max-axis BRE above [mm]");
    eval->add_option("--out", eval_out, "Write the filtered result file here");

    // detect
    auto* det = app.add_subcommand("detect", "Detect the arc center in a B-scan PGM");
    std::string det_image;
    double r_min = 20.0, r_max = 120.0;
    det->add_option("--image", det_image, "8-bit binary PGM")->required();
    det->add_option("--r-min", r_min, "Minimum radius [px]");
    det->add_option("--r-max", r_max, "Maximum radius [px]");

    // noise-study
    auto* study = app.add_subcommand("noise-study", "Residual spread vs pose noise");
    std::string study_sigmas = "0,0.5,1,2", study_out;
    int study_trials = 100, study_frames = 20;
    std::uint64_t study_seed = 1;
    study->add_option("--sigmas", study_sigmas, "Comma-separated noise stds [mm]");
    study->add_option("--trials", study_trials, "Trials per sigma");
    study->add_option("--frames", study_frames, "Frames per trial");
    study->add_option("--seed", study_seed, "RNG seed");
    study->add_option("--out", study_out, "Output CSV (defaults to stdout)");

    // pose
    auto* pose = app.add_subcommand("pose", "Planar fiducial pose from corner observations");
    std::string pose_intr, pose_target, pose_corners, pose_out;
    pose->add_option("--intrinsics", pose_intr, "Key/value intrinsics file (fx, fy, cx, cy)")
        ->required();
    pose->add_option("--target", pose_target, "Target CSV: point_index,x_mm,y_mm")->required();
    pose->add_option("--corners", pose_corners, "Corner CSV: frame_id,point_index,u,v")
        ->required();
    pose->add_option("--out", pose_out, "Output CSV of per-frame poses")->required();

    // cross-check
    auto* cross = app.add_subcommand("cross-check", "Compare Horn and SVD solutions");
    std::string cross_dataset, cross_mode = "rigid";
    cross->add_option("--dataset", cross_dataset, "Dataset directory")->required();
    cross->add_option("--mode", cross_mode, "rigid|similarity")
        ->check(CLI::IsMember({"rigid", "similarity"}));

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        uscal_generate_config cfg;
        check(uscal_generate_config_defaults(&cfg));
        cfg.n_frames = gen_frames;
        cfg.seed = gen_seed;
        cfg.sigma_t_mm = sigma_t;
        cfg.sigma_rot_rad = parse_angle_arg(sigma_rot);
        cfg.sigma_px = sigma_px;
        cfg.rot_x_min_rad = parse_angle_arg(rot_x_min);
        cfg.rot_x_max_rad = parse_angle_arg(rot_x_max);
        cfg.rot_y_min_rad = parse_angle_arg(rot_y_min);
        cfg.rot_y_max_rad = parse_angle_arg(rot_y_max);
        cfg.render_images = render ? 1 : 0;
        cfg.artifacts = artifacts == "none"
                            ? USCAL_ARTIFACTS_NONE
                            : (artifacts == "speckle" ? USCAL_ARTIFACTS_SPECKLE
                                                      : USCAL_ARTIFACTS_SPECKLE_WALLS);
        uscal_dataset* ds = nullptr;
        check(uscal_generate(&cfg, &ds));
        check(uscal_dataset_save(ds, gen_out.c_str()));
        std::printf("wrote %d frames to %s\n", uscal_dataset_frame_count(ds), gen_out.c_str());
        uscal_dataset_free(ds);
        return 0;
    }

    if (cal->parsed()) {
        uscal_dataset* ds = nullptr;
        check(uscal_dataset_load(cal_dataset.c_str(), &ds));
        uscal_result* result = nullptr;
        const int status = uscal_calibrate(ds, mode_from_string(cal_mode), &result);
        uscal_dataset_free(ds);
        check(status);
        uscal_transform t;
        check(uscal_result_transform(result, &t));
        print_transform(t);
        double mean[3], stddev[3], mn[3], mx[3];
        check(uscal_result_stats(result, mean, stddev, mn, mx));
        std::printf("bre.mean %.17g %.17g %.17g mm\n", mean[0], mean[1], mean[2]);
        if (!cal_out.empty()) check(uscal_result_save(result, cal_out.c_str()));
        uscal_result_free(result);
        return 0;
    }

    if (eval->parsed()) {
        uscal_dataset* ds = nullptr;
        check(uscal_dataset_load(eval_dataset.c_str(), &ds));
        uscal_result* result = nullptr;
        const int status =
            uscal_evaluate(ds, mode_from_string(eval_mode), eval_threshold, &result);
        uscal_dataset_free(ds);
        check(status);
        double mean[3], stddev[3], mn[3], mx[3];
        check(uscal_result_stats(result, mean, stddev, mn, mx));
        std::printf("frames_used %d\n", uscal_result_frame_count(result));
        std::printf("bre.mean %.17g %.17g %.17g mm\n", mean[0], mean[1], mean[2]);
        std::printf("bre.stddev %.17g %.17g %.17g mm\n", stddev[0], stddev[1], stddev[2]);
        std::printf("bre.min %.17g %.17g %.17g mm\n", mn[0], mn[1], mn[2]);
        std::printf("bre.max %.17g %.17g %.17g mm\n", mx[0], mx[1], mx[2]);
        if (!eval_out.empty()) check(uscal_result_save(result, eval_out.c_str()));
        uscal_result_free(result);
        return 0;
    }

    if (det->parsed()) {
        double a, b, r, score;
        check(uscal_detect_circle_pgm(det_image.c_str(), r_min, r_max, &a, &b, &r, &score));
        std::printf("%.17g %.17g %.17g %.17g\n", a, b, r, score);
        return 0;
    }

    if (study->parsed()) {
        std::vector<double> sigmas;
        std::string token;
        for (char c : study_sigmas + ",") {
            if (c == ',') {
                if (!token.empty()) sigmas.push_back(std::stod(token));
                token.clear();
            } else {
                token.push_back(c);
            }
        }
        uscal_generate_config cfg;
        check(uscal_generate_config_defaults(&cfg));
        cfg.n_frames = study_frames;
        cfg.seed = study_seed;
        std::vector<double> stds(sigmas.size());
        check(uscal_noise_study(&cfg, sigmas.data(), static_cast<int>(sigmas.size()),
                                study_trials, stds.data(),
                                study_out.empty() ? nullptr : study_out.c_str()));
        if (study_out.empty()) {
            std::printf("sigma,residual_std,trials\n");
            for (std::size_t i = 0; i < sigmas.size(); ++i) {
                std::printf("%.17g,%.17g,%d\n", sigmas[i], stds[i], study_trials);
            }
        }
        return 0;
    }

    if (pose->parsed()) {
        check(uscal_estimate_planar_pose_files(pose_intr.c_str(), pose_target.c_str(),
                                               pose_corners.c_str(), pose_out.c_str()));
        std::printf("wrote %s\n", pose_out.c_str());
        return 0;
    }

    if (cross->parsed()) {
        uscal_dataset* ds = nullptr;
        check(uscal_dataset_load(cross_dataset.c_str(), &ds));
        uscal_transform horn, svd;
        double rms_horn, rms_svd;
        const int status = uscal_cross_check(ds, mode_from_string(cross_mode), &horn, &svd,
                                             &rms_horn, &rms_svd);
        uscal_dataset_free(ds);
        check(status);
        std::printf("horn ");
        std::printf("%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", horn.qw, horn.qx,
                    horn.qy, horn.qz, horn.tx, horn.ty, horn.tz, horn.scale);
        std::printf("svd  ");
        std::printf("%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", svd.qw, svd.qx, svd.qy,
                    svd.qz, svd.tx, svd.ty, svd.tz, svd.scale);
        std::printf("rms_horn %.17g mm\n", rms_horn);
        std::printf("rms_svd %.17g mm\n", rms_svd);
        std::printf("rms_delta %.17g mm\n", std::fabs(rms_horn - rms_svd));
        return 0;
    }

    return 0;
}
