// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criterion 8 shells out to the CLI binary to check that
// identical seeds produce byte-identical outputs.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "uscal/calibrate.hpp"
#include "uscal/detect.hpp"
#include "uscal/error.hpp"
#include "uscal/io.hpp"
#include "uscal/planar_pose.hpp"
#include "uscal/synthetic.hpp"

using namespace uscal;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, double seconds, double budget,
            const std::string& detail = "") {
    const bool in_budget = seconds < budget;
    const bool ok = pass && in_budget;
    if (!ok) ++g_failures;
    std::printf("criterion %d (%s): %s  [%.2fs / %.0fs]%s%s\n", number, name.c_str(),
                ok ? "PASS" : "FAIL", seconds, budget, detail.empty() ? "" : "  ",
                detail.c_str());
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

RigidTransform random_rigid(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    std::uniform_real_distribution<double> comp(-1.0, 1.0);
    std::uniform_real_distribution<double> tr(-200.0, 200.0);
    Eigen::Vector3d axis(comp(rng), comp(rng), comp(rng));
    if (axis.norm() < 1e-6) axis = {0, 0, 1};
    RigidTransform t;
    t.rotation = UnitQuaternion::from_axis_angle(axis, ang(rng));
    t.translation = {tr(rng), tr(rng), tr(rng)};
    return t;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_1_exact_recovery() {
    Timer timer;
    SyntheticConfig cfg = SyntheticConfig::defaults();
    cfg.n_frames = 20;
    cfg.seed = 20250823;
    const auto frames = generate_poses(cfg);
    const CalibrationResult res = calibrate(frames, cfg.phantom, cfg.geometry, AlignMode::Rigid);

    bool pass = res.t_um.rotation.dot(cfg.t_um_true.rotation) >= 1.0 - 1e-10;
    pass = pass && (res.t_um.translation - cfg.t_um_true.translation).norm() < 1e-8;
    for (const auto& b : res.per_frame_bre) {
        pass = pass && b.abs_error.maxCoeff() <= 1e-10;
    }
    report(1, "exact recovery", pass, timer.seconds(), 1.0);
}

void criterion_2_oracle_equivalence() {
    Timer timer;
    std::mt19937_64 rng(60422);
    std::uniform_int_distribution<int> size(3, 50);
    const double sigmas[] = {0.0, 0.5, 1.0};
    bool pass = true;
    for (int i = 0; i < 1000 && pass; ++i) {
        const RigidTransform truth = random_rigid(rng);
        std::normal_distribution<double> noise(0.0, sigmas[i % 3]);
        std::uniform_real_distribution<double> c(-50.0, 50.0);
        CorrespondenceSet set;
        const int n = size(rng);
        for (int k = 0; k < n; ++k) {
            const Point3 p(c(rng), c(rng), c(rng));
            Point3 q = apply(truth, p);
            if (sigmas[i % 3] > 0.0) q += Point3(noise(rng), noise(rng), noise(rng));
            set.pairs.emplace_back(p, q);
        }
        const AbsOrientSolution horn = solve_horn(set, AlignMode::Rigid);
        const AbsOrientSolution svd = solve_svd_oracle(set, AlignMode::Rigid);
        pass = std::abs(horn.rms_residual - svd.rms_residual) < 1e-9 &&
               horn.transform.rotation.dot(svd.transform.rotation) >= 1.0 - 1e-9;
    }
    report(2, "oracle equivalence", pass, timer.seconds(), 10.0);
}

void criterion_3_noise_trend() {
    Timer timer;
    SyntheticConfig cfg = SyntheticConfig::defaults();
    cfg.seed = 61;
    const auto rows = noise_study(cfg, {0.0, 0.5, 1.0, 2.0}, 100);

    bool pass = rows.size() == 4 && rows[0].residual_std == 0.0;
    for (std::size_t i = 1; i < rows.size() && pass; ++i) {
        pass = rows[i].residual_std > rows[i - 1].residual_std;
    }
    const double r21 = rows[2].residual_std / rows[1].residual_std;
    const double r32 = rows[3].residual_std / rows[2].residual_std;
    pass = pass && r21 >= 1.6 && r21 <= 2.4 && r32 >= 1.6 && r32 <= 2.4;
    // Published reference points, matched within +-50%.
    const double reference[] = {0.272, 0.504, 1.127};
    for (int i = 0; i < 3 && pass; ++i) {
        const double v = rows[static_cast<std::size_t>(i) + 1].residual_std;
        pass = v >= 0.5 * reference[i] && v <= 1.5 * reference[i];
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail), "std = {%.3g, %.3g, %.3g, %.3g}",
                  rows[0].residual_std, rows[1].residual_std, rows[2].residual_std,
                  rows[3].residual_std);
    report(3, "noise trend", pass, timer.seconds(), 30.0, detail);
}

void criterion_4_detector_accuracy() {
    Timer timer;
    SyntheticConfig cfg = SyntheticConfig::defaults();
    cfg.n_frames = 50;
    cfg.seed = 424242;
    const auto frames = generate_poses(cfg);
    const double true_r = cfg.phantom.hemisphere_radius / cfg.geometry.s_x;

    bool pass = true;
    for (const auto& f : frames) {
        RenderOptions opts;
        opts.artifacts = RenderArtifacts::Speckle;
        opts.seed = cfg.seed ^ static_cast<std::uint64_t>(f.frame_id + 1);
        const BScanImage img = render_bscan(cfg.phantom, f, cfg.t_um_true, cfg.geometry, opts);
        try {
            const CircleDetection det = detect_circle(img, 20.0, 200.0);
            pass = pass && std::abs(det.center_u - f.u_px) <= 2.0 &&
                   std::abs(det.center_v - f.v_px) <= 2.0 &&
                   std::abs(det.radius_px - true_r) <= 2.0;
        } catch (const Error&) {
            pass = false;
        }
    }

    BScanImage blank({512, 512, 0.2, 0.2}, 0);
    try {
        detect_circle(blank, 20.0, 200.0);
        pass = false;
    } catch (const Error& e) {
        pass = pass && e.code() == ErrorCode::NoCircleFound;
    }
    report(4, "detector accuracy", pass, timer.seconds(), 30.0);
}

void criterion_5_near_millimeter() {
    Timer timer;
    SyntheticConfig cfg = SyntheticConfig::defaults();
    cfg.n_frames = 50;
    cfg.seed = 65;
    cfg.noise.sigma_t = 0.1;
    cfg.noise.sigma_px = 1.0;
    const auto frames = generate_poses(cfg);
    const CalibrationResult res = calibrate(frames, cfg.phantom, cfg.geometry, AlignMode::Rigid);

    bool pass = true;
    for (int a = 0; a < 3; ++a) pass = pass && res.stats.mean(a) < 1.0;

    const CalibrationResult filtered =
        filter_and_recalibrate(res, frames, cfg.phantom, cfg.geometry, 1.0);
    for (int a = 0; a < 3; ++a) {
        pass = pass && filtered.stats.mean(a) <= res.stats.mean(a) + 1e-12;
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail), "mean BRE = (%.3g, %.3g, %.3g) mm", res.stats.mean(0),
                  res.stats.mean(1), res.stats.mean(2));
    report(5, "near-millimeter end-to-end", pass, timer.seconds(), 10.0, detail);
}

void criterion_6_planar_pose() {
    Timer timer;
    const CameraIntrinsics intr{800.0, 800.0, 320.0, 240.0};
    const PlanarTarget board = PlanarTarget::checkerboard(8, 8, 20.0);
    const PlanarTarget quad = PlanarTarget::marker_quad(140.0);

    std::mt19937_64 rng(66);
    std::uniform_real_distribution<double> ang(-0.4, 0.4);
    std::uniform_real_distribution<double> off(-60.0, 60.0);
    auto random_pose = [&]() {
        RigidTransform t;
        t.rotation = UnitQuaternion::from_axis_angle({1, 0, 0}, ang(rng)) *
                     UnitQuaternion::from_axis_angle({0, 1, 0}, ang(rng)) *
                     UnitQuaternion::from_axis_angle({0, 0, 1}, ang(rng));
        t.translation = {off(rng), off(rng), 600.0 + off(rng)};
        return t;
    };
    auto observe = [&](const PlanarTarget& tg, const RigidTransform& pose, double sigma) {
        std::normal_distribution<double> n(0.0, sigma);
        std::vector<Pixel> obs;
        for (const auto& p : tg.points) {
            Pixel px = project(intr, pose, p);
            if (sigma > 0.0) {
                px.first += n(rng);
                px.second += n(rng);
            }
            obs.push_back(px);
        }
        return obs;
    };

    bool pass = true;
    for (int i = 0; i < 100 && pass; ++i) {
        const RigidTransform truth = random_pose();
        const PoseEstimate est = estimate_pose(intr, board, observe(board, truth, 0.0));
        const double err = (est.pose.translation - truth.translation).norm() +
                           est.pose.rotation.angle_to(truth.rotation);
        pass = err <= 1e-6;
        for (std::size_t k = 1; k < est.accepted_costs.size() && pass; ++k) {
            pass = est.accepted_costs[k] <= est.accepted_costs[k - 1];
        }
    }

    double sum_board = 0.0, sum_quad = 0.0;
    for (int i = 0; i < 200; ++i) {
        const RigidTransform truth = random_pose();
        const PoseEstimate b = estimate_pose(intr, board, observe(board, truth, 0.5));
        const PoseEstimate q = estimate_pose(intr, quad, observe(quad, truth, 0.5));
        sum_board += (b.pose.translation - truth.translation).norm() +
                     b.pose.rotation.angle_to(truth.rotation);
        sum_quad += (q.pose.translation - truth.translation).norm() +
                    q.pose.rotation.angle_to(truth.rotation);
    }
    pass = pass && sum_board <= sum_quad;
    report(6, "planar pose round trip", pass, timer.seconds(), 30.0);
}

void criterion_7_camera_rebase() {
    Timer timer;
    SyntheticConfig cfg = SyntheticConfig::defaults();
    cfg.n_frames = 25;
    cfg.seed = 67;
    cfg.noise.sigma_t = 0.2;
    const auto frames = generate_poses(cfg);
    const CalibrationResult base = calibrate(frames, cfg.phantom, cfg.geometry, AlignMode::Rigid);

    std::mt19937_64 rng(670);
    const RigidTransform g = random_rigid(rng);
    std::vector<FrameObservation> moved = frames;
    for (auto& f : moved) {
        f.t_mc = compose(g, f.t_mc);
        f.t_pc = compose(g, f.t_pc);
    }
    const CalibrationResult rebased =
        calibrate(moved, cfg.phantom, cfg.geometry, AlignMode::Rigid);

    bool pass = (rebased.t_um.to_homogeneous() - base.t_um.to_homogeneous())
                    .cwiseAbs()
                    .maxCoeff() < 1e-9;
    for (std::size_t i = 0; i < base.per_frame_bre.size() && pass; ++i) {
        pass = (rebased.per_frame_bre[i].abs_error - base.per_frame_bre[i].abs_error)
                   .cwiseAbs()
                   .maxCoeff() < 1e-9;
    }
    report(7, "camera-rebase invariance", pass, timer.seconds(), 1.0);
}

void criterion_8_determinism() {
    Timer timer;
    const fs::path work =
        fs::temp_directory_path() / ("uscal_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(work);
    fs::create_directories(work);

    bool pass = true;

    // In-process: save -> load is value-identical.
    {
        SyntheticConfig cfg = SyntheticConfig::defaults();
        cfg.n_frames = 12;
        cfg.seed = 68;
        cfg.noise.sigma_t = 0.3;
        Dataset ds;
        ds.phantom = cfg.phantom;
        ds.geometry = cfg.geometry;
        ds.frames = generate_poses(cfg);
        ds.provenance = "synthetic";
        save_dataset(ds, (work / "ds").string());
        const Dataset back = load_dataset((work / "ds").string());
        pass = pass && back.frames.size() == ds.frames.size();
        for (std::size_t i = 0; i < ds.frames.size() && pass; ++i) {
            pass = ds.frames[i].t_mc.translation == back.frames[i].t_mc.translation &&
                   ds.frames[i].t_mc.rotation.w() == back.frames[i].t_mc.rotation.w() &&
                   ds.frames[i].t_mc.rotation.x() == back.frames[i].t_mc.rotation.x() &&
                   ds.frames[i].t_mc.rotation.y() == back.frames[i].t_mc.rotation.y() &&
                   ds.frames[i].t_mc.rotation.z() == back.frames[i].t_mc.rotation.z() &&
                   ds.frames[i].u_px == back.frames[i].u_px &&
                   ds.frames[i].v_px == back.frames[i].v_px;
        }
    }

    // CLI: identical argv + seed give byte-identical outputs.
    const std::string cli = USCAL_CLI_PATH;
    auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    const std::string gen_args =
        "generate --frames 10 --seed 99 --sigma-t 0.3 --sigma-px 0.5 --render "
        "--artifacts speckle+walls --out ";
    pass = pass && run(gen_args + (work / "a").string());
    pass = pass && run(gen_args + (work / "b").string());
    if (pass) {
        for (const char* name : {"config.txt", "poses.csv", "features.csv"}) {
            pass = pass && read_file(work / "a" / name) == read_file(work / "b" / name);
        }
        for (int i = 0; i < 10 && pass; ++i) {
            const std::string img = "images/" + std::to_string(i) + ".pgm";
            pass = read_file(work / "a" / img) == read_file(work / "b" / img);
        }
    }
    pass = pass && run("calibrate --dataset " + (work / "a").string() + " --mode rigid --out " +
                       (work / "cal_a.txt").string());
    pass = pass && run("calibrate --dataset " + (work / "b").string() + " --mode rigid --out " +
                       (work / "cal_b.txt").string());
    pass = pass && !read_file(work / "cal_a.txt").empty() &&
           read_file(work / "cal_a.txt") == read_file(work / "cal_b.txt");

    fs::remove_all(work);
    report(8, "determinism & round trip", pass, timer.seconds(), 60.0);
}

}  // namespace

int main() {
    criterion_1_exact_recovery();
    criterion_2_oracle_equivalence();
    criterion_3_noise_trend();
    criterion_4_detector_accuracy();
    criterion_5_near_millimeter();
    criterion_6_planar_pose();
    criterion_7_camera_rebase();
    criterion_8_determinism();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
