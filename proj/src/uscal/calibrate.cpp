#include "uscal/calibrate.hpp"

#include <algorithm>
#include <limits>

#include "uscal/error.hpp"

namespace uscal {

AxisStats compute_stats(const std::vector<FrameBre>& bre) {
    AxisStats s;
    if (bre.empty()) return s;
    s.min = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    s.max = Eigen::Vector3d::Constant(-std::numeric_limits<double>::infinity());
    for (const auto& f : bre) {
        s.mean += f.abs_error;
        s.min = s.min.cwiseMin(f.abs_error);
        s.max = s.max.cwiseMax(f.abs_error);
    }
    s.mean /= static_cast<double>(bre.size());
    Eigen::Vector3d var = Eigen::Vector3d::Zero();
    for (const auto& f : bre) {
        const Eigen::Vector3d d = f.abs_error - s.mean;
        var += d.cwiseProduct(d);
    }
    var /= static_cast<double>(std::max<std::size_t>(1, bre.size() - 1));
    s.stddev = var.cwiseSqrt();
    return s;
}

CorrespondenceSet build_correspondences(const std::vector<FrameObservation>& frames,
                                        const PhantomModel& phantom, const BScanGeometry& geom,
                                        const std::string& feature_label) {
    geom.validate();
    CorrespondenceSet set;
    set.pairs.reserve(frames.size());
    for (const auto& f : frames) {
        const Point3 p_k(f.u_px * geom.s_x, f.v_px * geom.s_y, 0.0);
        const Point3 q_k = feature_in_marker_frame(phantom, feature_label, f.t_pc, f.t_mc);
        set.pairs.emplace_back(p_k, q_k);
    }
    set.validate();
    return set;
}

Eigen::Vector3d backprojection_error(const FrameObservation& frame, const PhantomModel& phantom,
                                     const BScanGeometry& geom, const RigidTransform& t_um,
                                     const std::string& feature_label) {
    const Point3 p_k(frame.u_px * geom.s_x, frame.v_px * geom.s_y, 0.0);
    const RigidTransform phantom_from_image =
        compose(inverse(frame.t_pc), compose(frame.t_mc, t_um));
    const Point3 p_hat = apply(phantom_from_image, p_k);
    return (p_hat - phantom.feature(feature_label).position).cwiseAbs();
}

CalibrationResult calibrate(const std::vector<FrameObservation>& frames,
                            const PhantomModel& phantom, const BScanGeometry& geom,
                            AlignMode mode, const std::string& feature_label) {
    const CorrespondenceSet set = build_correspondences(frames, phantom, geom, feature_label);
    const AbsOrientSolution sol = solve_horn(set, mode);

    CalibrationResult result;
    result.t_um = sol.transform;
    result.mode = mode;
    result.per_frame_bre.reserve(frames.size());
    result.frames_used.reserve(frames.size());
    for (const auto& f : frames) {
        result.per_frame_bre.push_back(
            {f.frame_id, backprojection_error(f, phantom, geom, result.t_um, feature_label)});
        result.frames_used.push_back(f.frame_id);
    }
    result.stats = compute_stats(result.per_frame_bre);
    return result;
}

CalibrationResult filter_and_recalibrate(const CalibrationResult& result,
                                         const std::vector<FrameObservation>& frames,
                                         const PhantomModel& phantom, const BScanGeometry& geom,
                                         double threshold_mm, const std::string& feature_label) {
    std::vector<FrameObservation> kept;
    kept.reserve(frames.size());
    for (const auto& bre : result.per_frame_bre) {
        if (bre.abs_error.maxCoeff() > threshold_mm) continue;
        const auto it = std::find_if(frames.begin(), frames.end(), [&](const FrameObservation& f) {
            return f.frame_id == bre.frame_id;
        });
        if (it != frames.end()) kept.push_back(*it);
    }
    if (kept.size() == result.per_frame_bre.size()) {
        return result;  // nothing filtered
    }
    if (kept.size() < 3) {
        throw Error(ErrorCode::TooFewInliers, "fewer than 3 frames survive the BRE threshold");
    }
    return calibrate(kept, phantom, geom, result.mode, feature_label);
}

}  // namespace uscal
