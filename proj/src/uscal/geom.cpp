#include "uscal/geom.hpp"

#include <cmath>

#include "uscal/error.hpp"

namespace uscal {

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z)
    : w_(w), x_(x), y_(y), z_(z) {
    normalize_and_canonicalize();
}

void UnitQuaternion::normalize_and_canonicalize() {
    const double n2 = w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_;
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw Error(ErrorCode::NumericalFailure, "cannot normalize zero/non-finite quaternion");
    }
    // Components that are already unit to machine precision are kept verbatim
    // so serialized quaternions round trip bit-exactly.
    if (std::abs(n2 - 1.0) > 1e-14) {
        const double n = std::sqrt(n2);
        w_ /= n;
        x_ /= n;
        y_ /= n;
        z_ /= n;
    }
    const double* c[4] = {&w_, &x_, &y_, &z_};
    for (const double* v : c) {
        if (*v > 0.0) break;
        if (*v < 0.0) {
            w_ = -w_;
            x_ = -x_;
            y_ = -y_;
            z_ = -z_;
            break;
        }
    }
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Eigen::Vector3d& axis, double angle_rad) {
    const Eigen::Vector3d u = axis.normalized();
    const double h = 0.5 * angle_rad;
    const double s = std::sin(h);
    return {std::cos(h), u.x() * s, u.y() * s, u.z() * s};
}

UnitQuaternion UnitQuaternion::from_matrix(const Mat3& rot) {
    Eigen::Quaterniond q(rot);
    return {q.w(), q.x(), q.y(), q.z()};
}

Mat3 UnitQuaternion::to_matrix() const {
    return Eigen::Quaterniond(w_, x_, y_, z_).toRotationMatrix();
}

UnitQuaternion UnitQuaternion::conjugate() const {
    return {w_, -x_, -y_, -z_};
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& rhs) const {
    const Eigen::Quaterniond a(w_, x_, y_, z_);
    const Eigen::Quaterniond b(rhs.w_, rhs.x_, rhs.y_, rhs.z_);
    const Eigen::Quaterniond p = a * b;
    return {p.w(), p.x(), p.y(), p.z()};
}

Eigen::Vector3d UnitQuaternion::rotate(const Eigen::Vector3d& v) const {
    return Eigen::Quaterniond(w_, x_, y_, z_) * v;
}

double UnitQuaternion::dot(const UnitQuaternion& rhs) const {
    return std::abs(w_ * rhs.w_ + x_ * rhs.x_ + y_ * rhs.y_ + z_ * rhs.z_);
}

double UnitQuaternion::angle_to(const UnitQuaternion& rhs) const {
    const double d = std::min(1.0, dot(rhs));
    return 2.0 * std::acos(d);
}

Mat4 RigidTransform::to_homogeneous() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = scale * rotation.to_matrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
}

RigidTransform RigidTransform::from_homogeneous(const Mat4& m) {
    Mat3 a = m.topLeftCorner<3, 3>();
    const double s = std::cbrt(a.determinant());
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error(ErrorCode::NumericalFailure, "homogeneous matrix is not a similarity transform");
    }
    RigidTransform t;
    t.scale = s;
    t.rotation = UnitQuaternion::from_matrix(a / s);
    t.translation = m.topRightCorner<3, 1>();
    return t;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    RigidTransform out;
    out.rotation = a.rotation * b.rotation;
    out.scale = a.scale * b.scale;
    out.translation = a.scale * a.rotation.rotate(b.translation) + a.translation;
    return out;
}

RigidTransform inverse(const RigidTransform& t) {
    RigidTransform out;
    out.rotation = t.rotation.conjugate();
    out.scale = 1.0 / t.scale;
    out.translation = -out.scale * out.rotation.rotate(t.translation);
    return out;
}

Point3 apply(const RigidTransform& t, const Point3& p) {
    return t.scale * t.rotation.rotate(p) + t.translation;
}

}  // namespace uscal
