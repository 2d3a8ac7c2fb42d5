#include "uscal/detect.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include <Eigen/Dense>

#include "uscal/error.hpp"

namespace uscal {
namespace {

constexpr double kWallSuppressRad = 10.0 * M_PI / 180.0;

// True when the gradient direction is within 10 degrees of an image axis;
// container walls produce exactly such edges.
bool is_axis_aligned(double direction) {
    const double folded = std::abs(std::remainder(direction, M_PI / 2.0));
    return folded < kWallSuppressRad;
}

struct Accumulator {
    int width = 0;
    int height = 0;
    std::vector<int> votes;

    Accumulator(int w, int h) : width(w), height(h), votes(static_cast<std::size_t>(w) * h, 0) {}
    int& at(int u, int v) { return votes[static_cast<std::size_t>(v) * width + u]; }
    int at(int u, int v) const { return votes[static_cast<std::size_t>(v) * width + u]; }
    bool in_bounds(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }

    int smoothed(int u, int v) const {
        int s = 0;
        for (int dv = -1; dv <= 1; ++dv) {
            for (int du = -1; du <= 1; ++du) {
                if (in_bounds(u + du, v + dv)) s += at(u + du, v + dv);
            }
        }
        return s;
    }
};

void vote_ray(Accumulator& acc, double u0, double v0, double du, double dv, double r_min,
              double r_max) {
    int last_u = INT_MIN, last_v = INT_MIN;
    for (double r = r_min; r <= r_max; r += 0.5) {
        const int u = static_cast<int>(std::lround(u0 + r * du));
        const int v = static_cast<int>(std::lround(v0 + r * dv));
        if (u == last_u && v == last_v) continue;
        last_u = u;
        last_v = v;
        if (acc.in_bounds(u, v)) ++acc.at(u, v);
    }
}

}  // namespace

EdgeMap detect_edges(const BScanImage& img, double grad_threshold) {
    img.geometry.validate();
    const int w = img.geometry.width, h = img.geometry.height;
    EdgeMap map;
    map.width = w;
    map.height = h;

    // 3x3 binomial smoothing knocks down speckle before differentiation.
    std::vector<double> smooth(static_cast<std::size_t>(w) * h, 0.0);
    static const double kernel[3] = {0.25, 0.5, 0.25};
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            double acc = 0.0;
            for (int dv = -1; dv <= 1; ++dv) {
                for (int du = -1; du <= 1; ++du) {
                    const int uu = std::clamp(u + du, 0, w - 1);
                    const int vv = std::clamp(v + dv, 0, h - 1);
                    acc += kernel[du + 1] * kernel[dv + 1] * img.at(uu, vv);
                }
            }
            smooth[static_cast<std::size_t>(v) * w + u] = acc;
        }
    }
    const auto sm = [&](int u, int v) { return smooth[static_cast<std::size_t>(v) * w + u]; };

    std::vector<double> gx(static_cast<std::size_t>(w) * h, 0.0);
    std::vector<double> gy(gx.size(), 0.0);
    double max_mag = 0.0;
    for (int v = 1; v + 1 < h; ++v) {
        for (int u = 1; u + 1 < w; ++u) {
            const double dx = (sm(u + 1, v) - sm(u - 1, v)) / 2.0;
            const double dy = (sm(u, v + 1) - sm(u, v - 1)) / 2.0;
            gx[static_cast<std::size_t>(v) * w + u] = dx;
            gy[static_cast<std::size_t>(v) * w + u] = dy;
            max_mag = std::max(max_mag, std::hypot(dx, dy));
        }
    }
    if (max_mag < 1e-9) return map;  // uniform image

    const double thresh = grad_threshold * max_mag;
    for (int v = 1; v + 1 < h; ++v) {
        for (int u = 1; u + 1 < w; ++u) {
            const double dx = gx[static_cast<std::size_t>(v) * w + u];
            const double dy = gy[static_cast<std::size_t>(v) * w + u];
            const double mag = std::hypot(dx, dy);
            if (mag > thresh) {
                map.edges.push_back({u, v, std::atan2(dy, dx), mag});
            }
        }
    }
    return map;
}

CircleDetection detect_circle(const BScanImage& img, double r_min, double r_max,
                              double grad_threshold, double score_threshold) {
    if (!(r_min < r_max) || r_min <= 0.0) {
        throw Error(ErrorCode::InvalidArgument, "require 0 < r_min < r_max");
    }
    if (img.geometry.width < 2 * r_min || img.geometry.height < 2 * r_min) {
        throw Error(ErrorCode::InvalidArgument, "image smaller than the minimum circle");
    }

    const EdgeMap edges = detect_edges(img, grad_threshold);
    std::vector<EdgePixel> voters;
    voters.reserve(edges.edges.size());
    for (const auto& e : edges.edges) {
        if (!is_axis_aligned(e.direction)) voters.push_back(e);
    }
    if (voters.empty()) {
        throw Error(ErrorCode::NoCircleFound, "no usable edge pixels");
    }

    // Stage 1: centers. The arc is convex toward the transducer, so the
    // center lies deeper in the image; votes follow the gradient line in the
    // direction of increasing v.
    Accumulator acc(img.geometry.width, img.geometry.height);
    for (const auto& e : voters) {
        double du = std::cos(e.direction);
        double dv = std::sin(e.direction);
        if (dv < 0.0) {
            du = -du;
            dv = -dv;
        }
        vote_ray(acc, e.u, e.v, du, dv, r_min, r_max);
        if (std::abs(dv) < 1e-9) {
            vote_ray(acc, e.u, e.v, -du, -dv, r_min, r_max);  // horizontal: ambiguous side
        }
    }

    int best_u = 0, best_v = 0, best_votes = -1;
    for (int v = 0; v < acc.height; ++v) {
        for (int u = 0; u < acc.width; ++u) {
            const int s = acc.smoothed(u, v);
            if (s > best_votes) {
                best_votes = s;
                best_u = u;
                best_v = v;
            }
        }
    }
    if (best_votes <= 0) {
        throw Error(ErrorCode::NoCircleFound, "empty accumulator");
    }

    // Sub-pixel center: centroid of the 3x3 accumulator neighborhood.
    double sum = 0.0, su = 0.0, sv = 0.0;
    for (int dv = -1; dv <= 1; ++dv) {
        for (int du = -1; du <= 1; ++du) {
            const int u = best_u + du, v = best_v + dv;
            if (!acc.in_bounds(u, v)) continue;
            const double wgt = acc.at(u, v);
            sum += wgt;
            su += wgt * u;
            sv += wgt * v;
        }
    }
    CircleDetection det;
    det.center_u = sum > 0.0 ? su / sum : best_u;
    det.center_v = sum > 0.0 ? sv / sum : best_v;

    // Stage 2: radius from the distance histogram around the center.
    const int n_bins = static_cast<int>(std::ceil(r_max - r_min)) + 1;
    std::vector<int> hist(static_cast<std::size_t>(n_bins), 0);
    for (const auto& e : voters) {
        const double d = std::hypot(e.u - det.center_u, e.v - det.center_v);
        const int bin = static_cast<int>(std::floor(d - r_min));
        if (bin >= 0 && bin < n_bins) ++hist[static_cast<std::size_t>(bin)];
    }
    // The edge band of a thick bright ridge is bimodal (inner and outer
    // edge), so pick the best 5-bin window and refine by its mean distance.
    const int kWindow = std::min(5, n_bins);
    int best_start = 0, best_sum = -1;
    for (int i = 0; i + kWindow <= n_bins; ++i) {
        int s = 0;
        for (int k = 0; k < kWindow; ++k) s += hist[static_cast<std::size_t>(i + k)];
        if (s > best_sum) {
            best_sum = s;
            best_start = i;
        }
    }
    if (best_sum <= 0) {
        throw Error(ErrorCode::NoCircleFound, "no edges in radius search range");
    }
    const double window_lo = r_min + best_start;
    const double window_hi = window_lo + kWindow;
    double r_sum = 0.0;
    int r_count = 0;
    for (const auto& e : voters) {
        const double d = std::hypot(e.u - det.center_u, e.v - det.center_v);
        if (d >= window_lo && d < window_hi) {
            r_sum += d;
            ++r_count;
        }
    }
    det.radius_px = r_sum / r_count;

    // Refine with an algebraic least-squares circle fit on the edge pixels
    // near the current estimate. The accumulator peak sits on a ridge that is
    // elongated along the vote direction, so under speckle it can land a few
    // pixels off; the fit uses the full arc and is insensitive to that.
    for (int pass = 0; pass < 3; ++pass) {
        Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
        Eigen::Vector3d atb = Eigen::Vector3d::Zero();
        int n_fit = 0;
        for (const auto& e : voters) {
            const double d = std::hypot(e.u - det.center_u, e.v - det.center_v);
            if (std::abs(d - det.radius_px) > 3.0) continue;
            const Eigen::Vector3d row(e.u, e.v, 1.0);
            ata += row * row.transpose();
            atb += row * (static_cast<double>(e.u) * e.u + static_cast<double>(e.v) * e.v);
            ++n_fit;
        }
        if (n_fit < 3) break;
        const Eigen::Vector3d abc = ata.ldlt().solve(atb);
        const double cu = abc[0] / 2.0, cv = abc[1] / 2.0;
        const double rr = abc[2] + cu * cu + cv * cv;
        if (!(rr > 0.0)) break;
        const double r = std::sqrt(rr);
        if (r < r_min || r > r_max) break;
        det.center_u = cu;
        det.center_v = cv;
        det.radius_px = r;
    }

    // Ambiguity: a second arc keeps its full support after the detected
    // circle's edge pixels are removed. Re-vote with the leftovers and look
    // for a separate peak with near-identical support. Ridge artifacts from a
    // partial arc collapse here because their voters lie on the circle.
    Accumulator rest(img.geometry.width, img.geometry.height);
    for (const auto& e : voters) {
        const double d = std::hypot(e.u - det.center_u, e.v - det.center_v);
        if (std::abs(d - det.radius_px) <= 3.0) continue;
        double du = std::cos(e.direction);
        double dv = std::sin(e.direction);
        if (dv < 0.0) {
            du = -du;
            dv = -dv;
        }
        vote_ray(rest, e.u, e.v, du, dv, r_min, r_max);
        if (std::abs(dv) < 1e-9) {
            vote_ray(rest, e.u, e.v, -du, -dv, r_min, r_max);
        }
    }
    const double sep = std::max(5.0, r_min);
    int second_votes = 0;
    for (int v = 0; v < rest.height; ++v) {
        for (int u = 0; u < rest.width; ++u) {
            if (std::hypot(u - det.center_u, v - det.center_v) <= sep) continue;
            second_votes = std::max(second_votes, rest.smoothed(u, v));
        }
    }
    if (second_votes >= 0.95 * best_votes) {
        throw Error(ErrorCode::AmbiguousPeak, "two circle-center candidates with similar support");
    }

    // Score: fraction of the circumference covered by edges near the circle.
    // All edge pixels count here, including the wall-suppressed ones; the
    // suppression exists to keep straight lines out of the vote, not to
    // discount the arc sectors whose normals happen to be axis-aligned.
    std::vector<bool> covered(360, false);
    for (const auto& e : edges.edges) {
        const double d = std::hypot(e.u - det.center_u, e.v - det.center_v);
        if (std::abs(d - det.radius_px) > 3.0) continue;
        const double ang = std::atan2(e.v - det.center_v, e.u - det.center_u);
        int bin = static_cast<int>(std::floor((ang + M_PI) / (2.0 * M_PI) * 360.0));
        bin = std::clamp(bin, 0, 359);
        covered[static_cast<std::size_t>(bin)] = true;
    }
    det.score = static_cast<double>(std::count(covered.begin(), covered.end(), true)) / 360.0;
    if (det.score < score_threshold) {
        throw Error(ErrorCode::NoCircleFound, "peak support below the detection threshold");
    }
    return det;
}

Point3 feature_to_image_point(const CircleDetection& d, const BScanGeometry& g) {
    return {g.s_x * d.center_u, g.s_y * d.center_v, 0.0};
}

}  // namespace uscal
