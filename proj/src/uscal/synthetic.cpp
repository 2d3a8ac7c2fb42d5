#include "uscal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "uscal/absorient.hpp"
#include "uscal/error.hpp"

namespace uscal {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(base ^ (a * 0x9e3779b97f4a7c15ULL)) ^ b);
}

double uniform_in(std::mt19937_64& rng, const AngleRange& r) {
    return std::uniform_real_distribution<double>(r.min, r.max)(rng);
}

Eigen::Vector3d random_unit_axis(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Vector3d v;
    do {
        v = {n(rng), n(rng), n(rng)};
    } while (v.norm() < 1e-12);
    return v.normalized();
}

}  // namespace

void NoiseSpec::validate() const {
    if (sigma_t < 0.0 || sigma_rot < 0.0 || sigma_px < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "noise sigmas must be non-negative");
    }
}

void SyntheticConfig::validate() const {
    if (n_frames < 3) {
        throw Error(ErrorCode::InvalidArgument, "need at least 3 frames");
    }
    if (!(rot_x.min <= rot_x.max) || !(rot_y.min <= rot_y.max) ||
        !(image_x_mm.min < image_x_mm.max) || !(image_y_mm.min < image_y_mm.max)) {
        throw Error(ErrorCode::InvalidArgument, "empty sampling range");
    }
    noise.validate();
    geometry.validate();
    phantom.validate();
    phantom.feature(feature_label);
}

SyntheticConfig SyntheticConfig::defaults() {
    SyntheticConfig cfg;
    cfg.t_um_true.rotation = UnitQuaternion::from_axis_angle({1.0, 2.0, 3.0}, 0.4);
    cfg.t_um_true.translation = {12.0, -4.0, 30.0};
    cfg.t_pc_true.rotation = UnitQuaternion::from_axis_angle({0.0, 1.0, 0.2}, 0.15);
    cfg.t_pc_true.translation = {150.0, 80.0, 600.0};
    return cfg;
}

std::vector<FrameObservation> generate_poses(const SyntheticConfig& cfg) {
    cfg.validate();
    const Point3 feature_p = cfg.phantom.feature(cfg.feature_label).position;
    const Point3 feature_c = apply(cfg.t_pc_true, feature_p);

    std::vector<FrameObservation> frames;
    frames.reserve(static_cast<std::size_t>(cfg.n_frames));
    for (int i = 0; i < cfg.n_frames; ++i) {
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));

        const double ax = uniform_in(rng, cfg.rot_x);
        const double ay = uniform_in(rng, cfg.rot_y);
        const Mat3 rot = (Eigen::AngleAxisd(cfg.rot_z, Eigen::Vector3d::UnitZ()) *
                          Eigen::AngleAxisd(ay, Eigen::Vector3d::UnitY()) *
                          Eigen::AngleAxisd(ax, Eigen::Vector3d::UnitX()))
                             .toRotationMatrix();

        const Point3 p_k(uniform_in(rng, cfg.image_x_mm), uniform_in(rng, cfg.image_y_mm), 0.0);

        // Choose the marker translation so the imaging plane point P_k lands
        // exactly on the phantom feature in camera space.
        FrameObservation f;
        f.frame_id = i;
        f.t_mc.rotation = UnitQuaternion::from_matrix(rot);
        f.t_mc.translation = feature_c - rot * apply(cfg.t_um_true, p_k);
        f.t_pc = cfg.t_pc_true;
        f.u_px = p_k.x() / cfg.geometry.s_x;
        f.v_px = p_k.y() / cfg.geometry.s_y;

        std::normal_distribution<double> gauss(0.0, 1.0);
        if (cfg.noise.sigma_t > 0.0) {
            for (int k = 0; k < 3; ++k) {
                f.t_mc.translation(k) += cfg.noise.sigma_t * gauss(rng);
            }
        }
        if (cfg.noise.sigma_rot > 0.0) {
            const Eigen::Vector3d axis = random_unit_axis(rng);
            const double angle = cfg.noise.sigma_rot * gauss(rng);
            f.t_mc.rotation = UnitQuaternion::from_axis_angle(axis, angle) * f.t_mc.rotation;
        }
        if (cfg.noise.sigma_px > 0.0) {
            f.u_px += cfg.noise.sigma_px * gauss(rng);
            f.v_px += cfg.noise.sigma_px * gauss(rng);
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

BScanImage render_bscan(const PhantomModel& m, const FrameObservation& frame,
                        const RigidTransform& t_um, const BScanGeometry& geom,
                        const RenderOptions& opts) {
    geom.validate();
    if (m.kind != PhantomKind::Hemisphere) {
        throw Error(ErrorCode::InvalidArgument, "renderer supports the hemisphere phantom only");
    }
    m.validate();

    // Sphere center in the US image frame; the image plane is z = 0 there.
    const RigidTransform image_from_phantom =
        compose(inverse(compose(frame.t_mc, t_um)), frame.t_pc);
    const Point3 center_u = apply(image_from_phantom, m.features.front().position);

    const double dz = std::abs(center_u.z());
    if (dz >= m.hemisphere_radius) {
        throw Error(ErrorCode::NoIntersection, "imaging plane misses the hemisphere");
    }
    const double r_mm = std::sqrt(m.hemisphere_radius * m.hemisphere_radius - dz * dz);
    const double cu = center_u.x() / geom.s_x;
    const double cv = center_u.y() / geom.s_y;

    BScanImage img(geom, 0);

    // Arc centered on the direction toward the transducer (the hemisphere top
    // is what the beam hits first).
    const double theta0 = -M_PI / 2.0;
    const double r_px = r_mm / std::min(geom.s_x, geom.s_y);
    const double dtheta = 0.25 / std::max(4.0, r_px);
    for (double t = -opts.arc_span_rad / 2.0; t <= opts.arc_span_rad / 2.0; t += dtheta) {
        const double theta = theta0 + t;
        const double pu = cu + r_mm * std::cos(theta) / geom.s_x;
        const double pv = cv + r_mm * std::sin(theta) / geom.s_y;
        const int iu = static_cast<int>(std::lround(pu));
        const int iv = static_cast<int>(std::lround(pv));
        for (int du = -2; du <= 2; ++du) {
            for (int dv = -2; dv <= 2; ++dv) {
                const int u = iu + du, v = iv + dv;
                if (!img.in_bounds(u, v)) continue;
                const double dx = u - pu, dy = v - pv;
                const double d2 = dx * dx + dy * dy;
                const auto val = static_cast<std::uint8_t>(
                    std::clamp(220.0 * std::exp(-d2 / 0.9), 0.0, 255.0));
                img.at(u, v) = std::max(img.at(u, v), val);
            }
        }
    }

    if (opts.artifacts == RenderArtifacts::SpeckleWalls) {
        // Container walls show up as straight lines.
        const int left = geom.width / 12;
        const int right = geom.width - geom.width / 12;
        const int bottom = geom.height - geom.height / 10;
        for (int v = 0; v < geom.height; ++v) {
            img.at(left, v) = std::max<std::uint8_t>(img.at(left, v), 170);
            img.at(right, v) = std::max<std::uint8_t>(img.at(right, v), 170);
        }
        for (int u = 0; u < geom.width; ++u) {
            img.at(u, bottom) = std::max<std::uint8_t>(img.at(u, bottom), 170);
        }
    }

    if (opts.artifacts != RenderArtifacts::None) {
        // Multiplicative Rayleigh speckle over a dark tissue background.
        std::mt19937_64 rng(derive_seed(opts.seed, 0x5bcc));
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double ray_scale = 0.7978845608028654;  // unit-mean Rayleigh
        for (auto& px : img.pixels) {
            const double g1 = gauss(rng), g2 = gauss(rng);
            const double ray = ray_scale * std::hypot(g1, g2);
            const double base = std::max<double>(px, 18.0);
            px = static_cast<std::uint8_t>(std::clamp(base * ray, 0.0, 255.0));
        }
    }
    return img;
}

std::vector<NoiseStudyRow> noise_study(const SyntheticConfig& cfg,
                                       const std::vector<double>& sigmas, int trials) {
    if (trials < 1) {
        throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
    }
    std::vector<NoiseStudyRow> rows;
    rows.reserve(sigmas.size());
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        std::vector<double> residuals;
        for (int trial = 0; trial < trials; ++trial) {
            SyntheticConfig c = cfg;
            c.noise.sigma_t = sigmas[si];
            c.seed = derive_seed(cfg.seed, si + 1, static_cast<std::uint64_t>(trial));
            const auto frames = generate_poses(c);

            CorrespondenceSet set;
            set.pairs.reserve(frames.size());
            for (const auto& f : frames) {
                const Point3 p_k(f.u_px * c.geometry.s_x, f.v_px * c.geometry.s_y, 0.0);
                const Point3 q_k =
                    feature_in_marker_frame(c.phantom, c.feature_label, f.t_pc, f.t_mc);
                set.pairs.emplace_back(p_k, q_k);
            }
            const auto sol = solve_horn(set, AlignMode::Rigid);
            residuals.insert(residuals.end(), sol.per_pair_residuals.begin(),
                             sol.per_pair_residuals.end());
        }
        double mean = 0.0;
        for (double r : residuals) mean += r;
        mean /= static_cast<double>(residuals.size());
        double var = 0.0;
        for (double r : residuals) var += (r - mean) * (r - mean);
        var /= std::max<std::size_t>(1, residuals.size() - 1);
        double std_dev = std::sqrt(var);
        if (std_dev < 1e-12) std_dev = 0.0;  // exact fit, pure round-off
        rows.push_back({sigmas[si], std_dev, trials});
    }
    return rows;
}

}  // namespace uscal
