#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "uscal/geom.hpp"

using namespace uscal;

namespace {

RigidTransform random_rigid(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    std::uniform_real_distribution<double> comp(-1.0, 1.0);
    std::uniform_real_distribution<double> tr(-100.0, 100.0);
    Eigen::Vector3d axis(comp(rng), comp(rng), comp(rng));
    if (axis.norm() < 1e-6) axis = {1, 0, 0};
    RigidTransform t;
    t.rotation = UnitQuaternion::from_axis_angle(axis, ang(rng));
    t.translation = {tr(rng), tr(rng), tr(rng)};
    return t;
}

RigidTransform random_similarity(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> sc(0.3, 3.0);
    RigidTransform t = random_rigid(rng);
    t.scale = sc(rng);
    return t;
}

Point3 random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-50.0, 50.0);
    return {c(rng), c(rng), c(rng)};
}

double transform_gap(const RigidTransform& a, const RigidTransform& b) {
    return (a.to_homogeneous() - b.to_homogeneous()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("quaternion stays unit-norm and canonical") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> c(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double w = c(rng), x = c(rng), y = c(rng), z = c(rng);
        if (std::abs(w) + std::abs(x) + std::abs(y) + std::abs(z) < 1e-6) continue;
        UnitQuaternion q(w, x, y, z);
        const double n = q.w() * q.w() + q.x() * q.x() + q.y() * q.y() + q.z() * q.z();
        CHECK(std::abs(n - 1.0) < 1e-12);
        CHECK(q.w() >= 0.0);
        UnitQuaternion neg(-w, -x, -y, -z);
        CHECK(q.w() == neg.w());
        CHECK(q.x() == neg.x());
        CHECK(q.y() == neg.y());
        CHECK(q.z() == neg.z());
    }
}

TEST_CASE("canonical sign tiebreak when w is zero") {
    UnitQuaternion a(0.0, -1.0, 0.0, 0.0);
    CHECK(a.x() == 1.0);
    UnitQuaternion b(0.0, 0.0, -1.0, 0.0);
    CHECK(b.y() == 1.0);
}

TEST_CASE("quaternion-matrix round trip") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 100; ++i) {
        const RigidTransform t = random_rigid(rng);
        const Mat3 m = t.rotation.to_matrix();
        CHECK((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(m.determinant() - 1.0) < 1e-10);
        const UnitQuaternion back = UnitQuaternion::from_matrix(m);
        CHECK(back.dot(t.rotation) >= 1.0 - 1e-12);
        CHECK((back.to_matrix() - m).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("apply basics") {
    CHECK((apply(RigidTransform::identity(), Point3(1, 2, 3)) - Point3(1, 2, 3)).norm() == 0.0);

    RigidTransform rot90;
    rot90.rotation = UnitQuaternion::from_axis_angle({0, 0, 1}, M_PI / 2.0);
    CHECK((apply(rot90, Point3(1, 0, 0)) - Point3(0, 1, 0)).norm() < 1e-12);

    RigidTransform scaled;
    scaled.scale = 2.0;
    scaled.translation = {1, 0, 0};
    CHECK((apply(scaled, Point3(3, 0, 0)) - Point3(7, 0, 0)).norm() < 1e-12);
}

TEST_CASE("compose identities and inverses") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 50; ++i) {
        const RigidTransform t = random_similarity(rng);
        CHECK(transform_gap(compose(RigidTransform::identity(), t), t) < 1e-12);
        CHECK(transform_gap(compose(t, RigidTransform::identity()), t) < 1e-12);
        CHECK(transform_gap(compose(t, inverse(t)), RigidTransform::identity()) < 1e-10);
        CHECK(transform_gap(compose(inverse(t), t), RigidTransform::identity()) < 1e-10);
    }
}

TEST_CASE("inverse of a pure translation negates it") {
    RigidTransform t;
    t.translation = {1, 2, 3};
    const RigidTransform inv = inverse(t);
    CHECK((inv.translation - Point3(-1, -2, -3)).norm() < 1e-12);
    CHECK(inv.rotation.dot(UnitQuaternion::identity()) == 1.0);
    CHECK(inv.scale == 1.0);
}

TEST_CASE("compose matches the homogeneous matrix-product oracle") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 100; ++i) {
        const RigidTransform a = random_similarity(rng);
        const RigidTransform b = random_similarity(rng);
        const Mat4 oracle = a.to_homogeneous() * b.to_homogeneous();
        CHECK((compose(a, b).to_homogeneous() - oracle).cwiseAbs().maxCoeff() < 1e-10);
        const Point3 p = random_point(rng);
        CHECK((apply(compose(a, b), p) - apply(a, apply(b, p))).norm() < 1e-10);
    }
}

TEST_CASE("inverse matches the homogeneous matrix-inverse oracle") {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 100; ++i) {
        const RigidTransform t = random_similarity(rng);
        const Mat4 oracle = t.to_homogeneous().inverse();
        CHECK((inverse(t).to_homogeneous() - oracle).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("from_homogeneous recovers rotation, translation, and scale") {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 50; ++i) {
        const RigidTransform t = random_similarity(rng);
        const RigidTransform back = RigidTransform::from_homogeneous(t.to_homogeneous());
        CHECK(back.rotation.dot(t.rotation) >= 1.0 - 1e-12);
        CHECK((back.translation - t.translation).norm() < 1e-10);
        CHECK(std::abs(back.scale - t.scale) < 1e-10);
    }
}

TEST_CASE("rigid apply preserves pairwise distances") {
    std::mt19937_64 rng(71);
    for (int i = 0; i < 100; ++i) {
        const RigidTransform t = random_rigid(rng);
        const Point3 p = random_point(rng), q = random_point(rng);
        const double before = (p - q).norm();
        const double after = (apply(t, p) - apply(t, q)).norm();
        CHECK(std::abs(after - before) < 1e-9);
    }
}

TEST_CASE("compose is associative") {
    std::mt19937_64 rng(81);
    for (int i = 0; i < 100; ++i) {
        const RigidTransform a = random_similarity(rng);
        const RigidTransform b = random_similarity(rng);
        const RigidTransform c = random_similarity(rng);
        const Point3 p = random_point(rng);
        const Point3 left = apply(compose(compose(a, b), c), p);
        const Point3 right = apply(compose(a, compose(b, c)), p);
        CHECK((left - right).norm() < 1e-9);
    }
}

TEST_CASE("compose multiplies scales") {
    RigidTransform a, b;
    a.scale = 2.0;
    b.scale = 3.0;
    CHECK(compose(a, b).scale == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(inverse(a).scale == doctest::Approx(0.5).epsilon(1e-12));
}
