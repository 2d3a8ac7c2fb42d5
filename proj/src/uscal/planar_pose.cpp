#include "uscal/planar_pose.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "uscal/error.hpp"

namespace uscal {
namespace {

Mat3 skew(const Eigen::Vector3d& v) {
    Mat3 m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

// Hartley-normalized direct linear transform for the board->image homography.
Mat3 homography_dlt(const std::vector<Point3>& board, const std::vector<Pixel>& obs) {
    const auto n = static_cast<Eigen::Index>(board.size());

    auto normalizer = [](const std::vector<Eigen::Vector2d>& pts) {
        Eigen::Vector2d c = Eigen::Vector2d::Zero();
        for (const auto& p : pts) c += p;
        c /= static_cast<double>(pts.size());
        double mean_d = 0.0;
        for (const auto& p : pts) mean_d += (p - c).norm();
        mean_d /= static_cast<double>(pts.size());
        const double s = mean_d > 1e-12 ? std::sqrt(2.0) / mean_d : 1.0;
        Mat3 t;
        t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
        return t;
    };

    std::vector<Eigen::Vector2d> bp(board.size()), ip(board.size());
    for (std::size_t i = 0; i < board.size(); ++i) {
        bp[i] = {board[i].x(), board[i].y()};
        ip[i] = {obs[i].first, obs[i].second};
    }
    const Mat3 tb = normalizer(bp);
    const Mat3 ti = normalizer(ip);

    Eigen::MatrixXd a(2 * n, 9);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector3d x = tb * Eigen::Vector3d(bp[i].x(), bp[i].y(), 1.0);
        const Eigen::Vector3d u = ti * Eigen::Vector3d(ip[i].x(), ip[i].y(), 1.0);
        a.row(2 * i) << -x.x(), -x.y(), -1, 0, 0, 0, u.x() * x.x(), u.x() * x.y(), u.x();
        a.row(2 * i + 1) << 0, 0, 0, -x.x(), -x.y(), -1, u.y() * x.x(), u.y() * x.y(), u.y();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd h = svd.matrixV().col(8);
    Mat3 hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    return ti.inverse() * hn * tb;
}

RigidTransform pose_from_homography(const CameraIntrinsics& intr, const Mat3& h,
                                    const std::vector<Point3>& board) {
    Mat3 k;
    k << intr.f_x, 0, intr.c_x, 0, intr.f_y, intr.c_y, 0, 0, 1;
    Mat3 a = k.inverse() * h;

    double lambda = 2.0 / (a.col(0).norm() + a.col(1).norm());
    // Keep the board in front of the camera.
    if ((lambda * a.col(2)).z() < 0.0) lambda = -lambda;

    const Eigen::Vector3d r1 = lambda * a.col(0);
    const Eigen::Vector3d r2 = lambda * a.col(1);
    Mat3 approx;
    approx.col(0) = r1;
    approx.col(1) = r2;
    approx.col(2) = r1.cross(r2);

    // Closest proper rotation.
    Eigen::JacobiSVD<Mat3> svd(approx, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
    const Mat3 r = svd.matrixU() * d * svd.matrixV().transpose();

    RigidTransform pose;
    pose.rotation = UnitQuaternion::from_matrix(r);
    pose.translation = lambda * a.col(2);

    for (const auto& p : board) {
        if (apply(pose, p).z() <= 0.0) {
            throw Error(ErrorCode::NumericalFailure,
                        "homography decomposition leaves target points behind the camera");
        }
    }
    return pose;
}

double total_cost(const CameraIntrinsics& intr, const RigidTransform& pose,
                  const std::vector<Point3>& board, const std::vector<Pixel>& obs) {
    double c = 0.0;
    for (std::size_t i = 0; i < board.size(); ++i) {
        const Pixel p = project(intr, pose, board[i]);
        const double du = p.first - obs[i].first;
        const double dv = p.second - obs[i].second;
        c += du * du + dv * dv;
    }
    return c;
}

}  // namespace

void CameraIntrinsics::validate() const {
    if (!(f_x > 0.0) || !(f_y > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "focal lengths must be positive");
    }
    if (!std::isfinite(c_x) || !std::isfinite(c_y)) {
        throw Error(ErrorCode::InvalidArgument, "principal point must be finite");
    }
}

void PlanarTarget::validate() const {
    if (points.size() < 4) {
        throw Error(ErrorCode::DegenerateTarget, "planar target needs at least 4 points");
    }
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& p : points) {
        if (p.z() != 0.0) {
            throw Error(ErrorCode::DegenerateTarget, "planar target points must have z = 0");
        }
        c += p.head<2>();
    }
    c /= static_cast<double>(points.size());
    Eigen::MatrixX2d m(static_cast<Eigen::Index>(points.size()), 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = points[i].head<2>().transpose() - c.transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixX2d> svd(m);
    if (!(svd.singularValues()(1) > 1e-9 * svd.singularValues()(0))) {
        throw Error(ErrorCode::DegenerateTarget, "planar target points are collinear");
    }
}

PlanarTarget PlanarTarget::checkerboard(int cols, int rows, double square_mm) {
    PlanarTarget t;
    t.layout = "checkerboard_" + std::to_string(cols) + "x" + std::to_string(rows);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            t.points.emplace_back(c * square_mm, r * square_mm, 0.0);
        }
    }
    return t;
}

PlanarTarget PlanarTarget::marker_quad(double side_mm) {
    PlanarTarget t;
    t.layout = "marker_quad";
    t.points = {{0.0, 0.0, 0.0}, {side_mm, 0.0, 0.0}, {side_mm, side_mm, 0.0}, {0.0, side_mm, 0.0}};
    return t;
}

Pixel project(const CameraIntrinsics& intr, const RigidTransform& pose, const Point3& p) {
    const Point3 x = apply(pose, p);
    if (x.z() <= 0.0) {
        throw Error(ErrorCode::BehindCamera, "point projects behind the camera");
    }
    return {intr.f_x * x.x() / x.z() + intr.c_x, intr.f_y * x.y() / x.z() + intr.c_y};
}

PoseEstimate estimate_pose(const CameraIntrinsics& intr, const PlanarTarget& target,
                           const std::vector<Pixel>& observations) {
    intr.validate();
    target.validate();
    if (observations.size() != target.points.size()) {
        throw Error(ErrorCode::InvalidArgument, "observation count must match target points");
    }

    const Mat3 h = homography_dlt(target.points, observations);
    RigidTransform pose = pose_from_homography(intr, h, target.points);

    const auto n = target.points.size();
    double cost = total_cost(intr, pose, target.points, observations);
    double lambda = 1e-6;
    int iterations = 0;
    std::vector<double> accepted_costs{cost};

    for (; iterations < 100; ++iterations) {
        Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const Point3 x = apply(pose, target.points[i]);
            const double z = x.z();
            Eigen::Matrix<double, 2, 3> jp;
            jp << intr.f_x / z, 0, -intr.f_x * x.x() / (z * z),
                  0, intr.f_y / z, -intr.f_y * x.y() / (z * z);
            const Eigen::Vector3d w = pose.rotation.rotate(target.points[i]);
            Eigen::Matrix<double, 2, 6> j;
            j.leftCols<3>() = jp * (-skew(w));  // rotation (left perturbation)
            j.rightCols<3>() = jp;              // translation
            const Pixel proj = {intr.f_x * x.x() / z + intr.c_x, intr.f_y * x.y() / z + intr.c_y};
            const Eigen::Vector2d r(proj.first - observations[i].first,
                                    proj.second - observations[i].second);
            jtj += j.transpose() * j;
            jtr += j.transpose() * r;
        }

        bool converged = false;
        while (true) {
            Eigen::Matrix<double, 6, 6> damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal();
            const Eigen::Matrix<double, 6, 1> delta = -damped.ldlt().solve(jtr);
            if (delta.norm() < 1e-10) {
                converged = true;
                break;
            }
            RigidTransform trial = pose;
            const Eigen::Vector3d dtheta = delta.head<3>();
            const double angle = dtheta.norm();
            if (angle > 0.0) {
                trial.rotation = UnitQuaternion::from_axis_angle(dtheta, angle) * trial.rotation;
            }
            trial.translation += delta.tail<3>();
            double trial_cost;
            try {
                trial_cost = total_cost(intr, trial, target.points, observations);
            } catch (const Error&) {
                trial_cost = std::numeric_limits<double>::infinity();  // stepped behind camera
            }
            if (trial_cost <= cost) {
                pose = trial;
                cost = trial_cost;
                accepted_costs.push_back(cost);
                lambda = std::max(1e-12, lambda / 3.0);
                break;
            }
            lambda *= 10.0;
            if (lambda > 1e14) {
                throw Error(ErrorCode::DivergedRefinement,
                            "refinement cannot reduce the reprojection error");
            }
        }
        if (converged) break;
    }

    PoseEstimate est;
    est.pose = pose;
    est.rms_reprojection = std::sqrt(cost / static_cast<double>(n));
    est.iterations = iterations;
    est.accepted_costs = std::move(accepted_costs);
    return est;
}

}  // namespace uscal
