#include "uscal/phantom.hpp"

#include "uscal/error.hpp"

namespace uscal {

const char* phantom_kind_name(PhantomKind kind) {
    switch (kind) {
        case PhantomKind::Hemisphere: return "hemisphere";
        case PhantomKind::Point: return "point";
        case PhantomKind::MultiWire: return "multi_wire";
    }
    return "unknown";
}

PhantomKind phantom_kind_from_name(const std::string& name) {
    if (name == "hemisphere") return PhantomKind::Hemisphere;
    if (name == "point") return PhantomKind::Point;
    if (name == "multi_wire") return PhantomKind::MultiWire;
    throw Error(ErrorCode::ParseError, "unknown phantom kind: " + name);
}

void PhantomModel::validate() const {
    if (features.empty()) {
        throw Error(ErrorCode::InvalidArgument, "phantom needs at least one feature");
    }
    if (kind == PhantomKind::Hemisphere) {
        if (features.size() != 1) {
            throw Error(ErrorCode::InvalidArgument,
                        "hemisphere phantom has exactly one feature (the sphere center)");
        }
        if (!(hemisphere_radius > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "hemisphere radius must be positive");
        }
    }
    for (const auto& f : features) {
        for (int i = 0; i < 3; ++i) {
            if (f.position(i) < 0.0 || f.position(i) > container(i)) {
                throw Error(ErrorCode::InvalidArgument,
                            "feature '" + f.label + "' lies outside the container box");
            }
        }
    }
}

const PhantomFeature& PhantomModel::feature(const std::string& label) const {
    for (const auto& f : features) {
        if (f.label == label) return f;
    }
    throw Error(ErrorCode::UnknownLabel, "no phantom feature labeled '" + label + "'");
}

PhantomModel PhantomModel::hemisphere_preset() {
    PhantomModel m;
    m.kind = PhantomKind::Hemisphere;
    m.container = {120.0, 120.0, 80.0};
    m.hemisphere_radius = 15.0;
    m.features = {{"0", {60.0, 60.0, 40.0}}};
    return m;
}

PhantomModel PhantomModel::point_preset() {
    PhantomModel m;
    m.kind = PhantomKind::Point;
    m.container = {120.0, 120.0, 80.0};
    m.features = {{"0", {60.0, 60.0, 12.0}}};
    return m;
}

PhantomModel PhantomModel::multi_wire_preset() {
    PhantomModel m;
    m.kind = PhantomKind::MultiWire;
    m.container = {160.0, 120.0, 80.0};
    // Two cross-wire intersections and two parallel-wire midpoints.
    m.features = {{"cross0", {40.0, 60.0, 30.0}},
                  {"cross1", {120.0, 60.0, 30.0}},
                  {"wire0", {80.0, 40.0, 45.0}},
                  {"wire1", {80.0, 80.0, 45.0}}};
    return m;
}

Point3 feature_in_marker_frame(const PhantomModel& m, const std::string& label,
                               const RigidTransform& t_pc, const RigidTransform& t_mc) {
    const PhantomFeature& f = m.feature(label);
    return apply(compose(inverse(t_mc), t_pc), f.position);
}

}  // namespace uscal
