#include "uscal/absorient.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "uscal/error.hpp"

namespace uscal {
namespace {

Eigen::MatrixX3d centered_matrix(const CorrespondenceSet& c, bool first,
                                 Point3* centroid_out = nullptr) {
    const auto n = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixX3d m(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        m.row(i) = first ? c.pairs[i].first : c.pairs[i].second;
    }
    const Eigen::RowVector3d centroid = m.colwise().mean();
    m.rowwise() -= centroid;
    if (centroid_out) *centroid_out = centroid.transpose();
    return m;
}

bool is_collinear(const Eigen::MatrixX3d& centered) {
    Eigen::JacobiSVD<Eigen::MatrixX3d> svd(centered);
    const auto& sv = svd.singularValues();
    // Image-plane points are always coplanar, so only the second singular
    // value is required to be significant.
    return !(sv(1) > 1e-9 * sv(0));
}

AbsOrientSolution finish(const CorrespondenceSet& c, const Eigen::MatrixX3d& p,
                         const Eigen::MatrixX3d& q, const Point3& p_centroid,
                         const Point3& q_centroid, const UnitQuaternion& rot,
                         AlignMode mode) {
    double scale = 1.0;
    if (mode == AlignMode::Similarity) {
        const double sp = p.squaredNorm();
        const double sq = q.squaredNorm();
        if (!(sp > 0.0)) {
            throw Error(ErrorCode::DegenerateInput, "zero-spread source set in similarity mode");
        }
        scale = std::sqrt(sq / sp);
    }

    AbsOrientSolution sol;
    sol.transform.rotation = rot;
    sol.transform.scale = scale;
    sol.transform.translation = q_centroid - scale * rot.rotate(p_centroid);

    sol.per_pair_residuals.reserve(c.size());
    double sum_sq = 0.0;
    for (const auto& [pk, qk] : c.pairs) {
        const double r = (qk - apply(sol.transform, pk)).norm();
        sol.per_pair_residuals.push_back(r);
        sum_sq += r * r;
    }
    sol.rms_residual = std::sqrt(sum_sq / static_cast<double>(c.size()));
    return sol;
}

}  // namespace

void CorrespondenceSet::validate() const {
    if (pairs.size() < 3) {
        throw Error(ErrorCode::DegenerateInput, "need at least 3 point pairs");
    }
    if (is_collinear(centered_matrix(*this, true)) ||
        is_collinear(centered_matrix(*this, false))) {
        throw Error(ErrorCode::DegenerateInput, "point set is collinear or degenerate");
    }
}

AbsOrientSolution solve_horn(const CorrespondenceSet& c, AlignMode mode) {
    c.validate();
    Point3 pc, qc;
    const Eigen::MatrixX3d p = centered_matrix(c, true, &pc);
    const Eigen::MatrixX3d q = centered_matrix(c, false, &qc);

    const Mat3 s = p.transpose() * q;  // cross-covariance, P against Q

    Mat4 n;
    const double sxx = s(0, 0), sxy = s(0, 1), sxz = s(0, 2);
    const double syx = s(1, 0), syy = s(1, 1), syz = s(1, 2);
    const double szx = s(2, 0), szy = s(2, 1), szz = s(2, 2);
    n << sxx + syy + szz, syz - szy,       szx - sxz,       sxy - syx,
         syz - szy,       sxx - syy - szz, sxy + syx,       szx + sxz,
         szx - sxz,       sxy + syx,      -sxx + syy - szz, syz + szy,
         sxy - syx,       szx + sxz,       syz + szy,      -sxx - syy + szz;

    Eigen::SelfAdjointEigenSolver<Mat4> eig(n);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "eigen-decomposition failed to converge");
    }
    // Eigenvalues are sorted ascending; the rotation is the eigenvector of
    // the maximum eigenvalue.
    const Eigen::Vector4d v = eig.eigenvectors().col(3);
    const UnitQuaternion rot(v(0), v(1), v(2), v(3));

    return finish(c, p, q, pc, qc, rot, mode);
}

AbsOrientSolution solve_svd_oracle(const CorrespondenceSet& c, AlignMode mode) {
    c.validate();
    Point3 pc, qc;
    const Eigen::MatrixX3d p = centered_matrix(c, true, &pc);
    const Eigen::MatrixX3d q = centered_matrix(c, false, &qc);

    const Mat3 h = p.transpose() * q;
    Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
    const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();

    return finish(c, p, q, pc, qc, UnitQuaternion::from_matrix(r), mode);
}

}  // namespace uscal
