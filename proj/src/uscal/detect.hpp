#pragma once

#include <vector>

#include "uscal/geom.hpp"
#include "uscal/image.hpp"

namespace uscal {

struct EdgePixel {
    int u = 0;
    int v = 0;
    double direction = 0.0;  // gradient direction, radians
    double magnitude = 0.0;
};

struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<EdgePixel> edges;
};

// Central-difference gradient; a pixel is an edge when its gradient magnitude
// exceeds `grad_threshold` times the image maximum.
EdgeMap detect_edges(const BScanImage& img, double grad_threshold = 0.3);

struct CircleDetection {
    double center_u = 0.0;  // sub-pixel
    double center_v = 0.0;
    double radius_px = 0.0;
    double score = 0.0;  // fraction of the circumference supported by edges
};

// Two-stage Hough: edge pixels vote along their gradient line for the center,
// then a distance histogram from the winning center picks the radius.
CircleDetection detect_circle(const BScanImage& img, double r_min, double r_max,
                              double grad_threshold = 0.3, double score_threshold = 0.1);

// Converts a detected center to the metric image-plane point handed to the
// solver: (s_x * a, s_y * b, 0).
Point3 feature_to_image_point(const CircleDetection& d, const BScanGeometry& g);

}  // namespace uscal
