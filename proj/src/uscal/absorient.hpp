#pragma once

#include <utility>
#include <vector>

#include "uscal/geom.hpp"

namespace uscal {

enum class AlignMode { Rigid, Similarity };

// Paired point sets; P_k are metric image-plane points, Q_k the phantom
// feature mapped into the marker frame.
struct CorrespondenceSet {
    std::vector<std::pair<Point3, Point3>> pairs;

    std::size_t size() const { return pairs.size(); }

    // Throws DegenerateInput when fewer than 3 pairs or either side is
    // collinear (second singular value of the centered point matrix below
    // 1e-9 of the largest).
    void validate() const;
};

struct AbsOrientSolution {
    RigidTransform transform;          // maps P_k onto Q_k
    double rms_residual = 0.0;         // mm
    std::vector<double> per_pair_residuals;
};

// Horn's closed-form solution: rotation from the dominant eigenvector of the
// symmetric 4x4 quaternion matrix, symmetric scale in similarity mode,
// translation from the centroids.
AbsOrientSolution solve_horn(const CorrespondenceSet& c, AlignMode mode);

// Independent cross-check via SVD of the centered cross-covariance (Kabsch),
// with the determinant correction that enforces a proper rotation.
AbsOrientSolution solve_svd_oracle(const CorrespondenceSet& c, AlignMode mode);

}  // namespace uscal
