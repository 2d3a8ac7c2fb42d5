#pragma once

#include <Eigen/Dense>

namespace uscal {

using Point3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Unit quaternion with a canonical sign: w >= 0, ties broken by the first
// nonzero component being >= 0. Canonicalization makes field-wise equality
// of rotations well defined.
class UnitQuaternion {
public:
    UnitQuaternion() : w_(1), x_(0), y_(0), z_(0) {}
    UnitQuaternion(double w, double x, double y, double z);

    static UnitQuaternion identity() { return {}; }
    static UnitQuaternion from_axis_angle(const Eigen::Vector3d& axis, double angle_rad);
    static UnitQuaternion from_matrix(const Mat3& rot);

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    Mat3 to_matrix() const;
    UnitQuaternion conjugate() const;
    UnitQuaternion operator*(const UnitQuaternion& rhs) const;
    Eigen::Vector3d rotate(const Eigen::Vector3d& v) const;

    // Absolute dot product; 1 for identical rotations regardless of sign.
    double dot(const UnitQuaternion& rhs) const;
    double angle_to(const UnitQuaternion& rhs) const;

private:
    void normalize_and_canonicalize();
    double w_, x_, y_, z_;
};

// Similarity transform p -> s * R * p + t. scale == 1 for rigid motions.
struct RigidTransform {
    UnitQuaternion rotation;
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    double scale = 1.0;

    static RigidTransform identity() { return {}; }

    Mat4 to_homogeneous() const;
    static RigidTransform from_homogeneous(const Mat4& m);
};

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);
Point3 apply(const RigidTransform& t, const Point3& p);

}  // namespace uscal
