#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uscal/geom.hpp"
#include "uscal/image.hpp"
#include "uscal/phantom.hpp"

namespace uscal {

// Gaussian perturbations applied after the exact chain is built.
struct NoiseSpec {
    double sigma_t = 0.0;    // mm, per marker-translation component
    double sigma_rot = 0.0;  // radians, small random-axis rotation
    double sigma_px = 0.0;   // pixels, on the detected feature pixel

    void validate() const;
};

struct FrameObservation {
    int frame_id = 0;
    RigidTransform t_mc;  // marker -> camera
    RigidTransform t_pc;  // phantom -> camera
    double u_px = 0.0;
    double v_px = 0.0;
    std::optional<BScanImage> bscan;
};

struct AngleRange {
    double min = 0.0;
    double max = 0.0;
};

struct SyntheticConfig {
    int n_frames = 20;
    std::uint64_t seed = 1;
    AngleRange rot_x{-0.3, 0.3};  // radians, probe sweep about x
    AngleRange rot_y{-0.3, 0.3};  // radians, probe sweep about y
    double rot_z = 0.0;           // fixed
    AngleRange image_x_mm{30.0, 70.0};  // P_k sampling bounds in the image plane
    AngleRange image_y_mm{30.0, 70.0};
    NoiseSpec noise;
    RigidTransform t_um_true;
    RigidTransform t_pc_true;
    PhantomModel phantom = PhantomModel::hemisphere_preset();
    std::string feature_label = "0";
    BScanGeometry geometry{512, 512, 0.2, 0.2};

    void validate() const;
    static SyntheticConfig defaults();
};

// Samples probe poses whose imaging plane passes through the phantom feature,
// then perturbs them per NoiseSpec. Deterministic for a given config.
std::vector<FrameObservation> generate_poses(const SyntheticConfig& cfg);

enum class RenderArtifacts { None, Speckle, SpeckleWalls };

struct RenderOptions {
    RenderArtifacts artifacts = RenderArtifacts::None;
    double arc_span_rad = 4.71238898038469;  // 270 degrees
    std::uint64_t seed = 1;
};

// Draws the sphere/plane intersection arc into a fresh B-scan. Throws
// NoIntersection when the imaging plane misses the hemisphere.
BScanImage render_bscan(const PhantomModel& m, const FrameObservation& frame,
                        const RigidTransform& t_um, const BScanGeometry& geom,
                        const RenderOptions& opts);

struct NoiseStudyRow {
    double sigma = 0.0;          // mm
    double residual_std = 0.0;   // mm
    int trials = 0;
};

// Sweeps translation noise over `sigmas`, running generate -> calibrate per
// trial and reporting the standard deviation of per-pair residual norms.
std::vector<NoiseStudyRow> noise_study(const SyntheticConfig& cfg,
                                       const std::vector<double>& sigmas, int trials);

}  // namespace uscal
