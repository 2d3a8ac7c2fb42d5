#pragma once

#include <string>
#include <vector>

#include "uscal/absorient.hpp"
#include "uscal/geom.hpp"
#include "uscal/image.hpp"
#include "uscal/phantom.hpp"
#include "uscal/synthetic.hpp"

namespace uscal {

struct AxisStats {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Vector3d stddev = Eigen::Vector3d::Zero();
    Eigen::Vector3d min = Eigen::Vector3d::Zero();
    Eigen::Vector3d max = Eigen::Vector3d::Zero();
};

struct FrameBre {
    int frame_id = 0;
    Eigen::Vector3d abs_error = Eigen::Vector3d::Zero();  // |dx|, |dy|, |dz| in mm
};

struct CalibrationResult {
    RigidTransform t_um;
    AlignMode mode = AlignMode::Rigid;
    std::vector<FrameBre> per_frame_bre;  // one entry per frame in frames_used
    AxisStats stats;
    std::vector<int> frames_used;
};

AxisStats compute_stats(const std::vector<FrameBre>& bre);

// P_k from the feature pixel and pixel scales, Q_k from the pose chain.
CorrespondenceSet build_correspondences(const std::vector<FrameObservation>& frames,
                                        const PhantomModel& phantom, const BScanGeometry& geom,
                                        const std::string& feature_label = "0");

CalibrationResult calibrate(const std::vector<FrameObservation>& frames,
                            const PhantomModel& phantom, const BScanGeometry& geom,
                            AlignMode mode, const std::string& feature_label = "0");

// Componentwise |P_hat - P_phantom| where P_hat maps the image point through
// the calibrated chain back into the phantom frame.
Eigen::Vector3d backprojection_error(const FrameObservation& frame, const PhantomModel& phantom,
                                     const BScanGeometry& geom, const RigidTransform& t_um,
                                     const std::string& feature_label = "0");

// Single-pass outlier removal: drops frames whose max-axis BRE exceeds the
// threshold, then re-solves on the survivors.
CalibrationResult filter_and_recalibrate(const CalibrationResult& result,
                                         const std::vector<FrameObservation>& frames,
                                         const PhantomModel& phantom, const BScanGeometry& geom,
                                         double threshold_mm,
                                         const std::string& feature_label = "0");

}  // namespace uscal
