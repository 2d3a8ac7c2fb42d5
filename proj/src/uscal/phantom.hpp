#pragma once

#include <string>
#include <vector>

#include "uscal/geom.hpp"

namespace uscal {

enum class PhantomKind { Hemisphere, Point, MultiWire };

const char* phantom_kind_name(PhantomKind kind);
PhantomKind phantom_kind_from_name(const std::string& name);

struct PhantomFeature {
    std::string label;
    Point3 position;  // phantom CS, mm
};

// Phantom geometry in its own coordinate system. The origin sits at a corner
// of the phantom marker; feature positions are measured from there in mm.
struct PhantomModel {
    PhantomKind kind = PhantomKind::Hemisphere;
    std::vector<PhantomFeature> features;
    double hemisphere_radius = 0.0;           // mm, hemisphere kind only
    Eigen::Vector3d container = Eigen::Vector3d::Zero();  // box extents, mm

    void validate() const;
    const PhantomFeature& feature(const std::string& label) const;

    // The shipped designs: the hemisphere that was kept, and the point and
    // 4-wire layouts that were rejected for artifact-rich images.
    static PhantomModel hemisphere_preset();
    static PhantomModel point_preset();
    static PhantomModel multi_wire_preset();
};

// Maps a phantom feature into the marker frame: (T_MC)^-1 * T_PC applied to
// the feature position. This is the Q_k fed to the solver.
Point3 feature_in_marker_frame(const PhantomModel& m, const std::string& label,
                               const RigidTransform& t_pc, const RigidTransform& t_mc);

}  // namespace uscal
