#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uscal/geom.hpp"

namespace uscal {

struct CameraIntrinsics {
    double f_x = 0.0;  // pixels
    double f_y = 0.0;
    double c_x = 0.0;
    double c_y = 0.0;

    void validate() const;
};

// Planar fiducial geometry in the board frame (z = 0 everywhere).
struct PlanarTarget {
    std::vector<Point3> points;  // mm
    std::string layout;

    void validate() const;

    static PlanarTarget checkerboard(int cols, int rows, double square_mm);
    static PlanarTarget marker_quad(double side_mm);
};

struct PoseEstimate {
    RigidTransform pose;  // target -> camera
    double rms_reprojection = 0.0;  // pixels
    int iterations = 0;
    std::vector<double> accepted_costs;  // total squared error after each accepted step
};

using Pixel = std::pair<double, double>;

// Pinhole projection. Throws BehindCamera when the transformed point has
// non-positive depth.
Pixel project(const CameraIntrinsics& intr, const RigidTransform& pose, const Point3& p);

// Initial pose from a normalized-DLT homography decomposition, refined by
// damped Gauss-Newton on the total squared reprojection error.
PoseEstimate estimate_pose(const CameraIntrinsics& intr, const PlanarTarget& target,
                           const std::vector<Pixel>& observations);

}  // namespace uscal
