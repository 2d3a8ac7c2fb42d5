#pragma once

#include <string>
#include <vector>

#include "uscal/calibrate.hpp"
#include "uscal/image.hpp"
#include "uscal/phantom.hpp"
#include "uscal/planar_pose.hpp"
#include "uscal/synthetic.hpp"

namespace uscal {

// On-disk dataset:
//   <root>/config.txt      key = value, unit tags mandatory on dimensional keys
//   <root>/poses.csv       frame_id + quaternion/translation columns for _mc and _pc
//   <root>/features.csv    frame_id,u_px,v_px
//   <root>/images/<id>.pgm optional B-scans
struct Dataset {
    std::string root;
    PhantomModel phantom;
    BScanGeometry geometry;
    std::vector<FrameObservation> frames;
    std::string provenance = "external";

    void validate() const;
};

Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& ds, const std::string& path);

void save_calibration_result(const CalibrationResult& result, const std::string& path);

void save_noise_study_csv(const std::vector<NoiseStudyRow>& rows, const std::string& path);

CameraIntrinsics load_intrinsics(const std::string& path);

// CSV `point_index,x_mm,y_mm`; points are sorted by index, z = 0.
PlanarTarget load_planar_target(const std::string& path);

struct CornerObservation {
    int frame_id = 0;
    int point_index = 0;
    double u = 0.0;
    double v = 0.0;
};

// CSV `frame_id,point_index,u,v`.
std::vector<CornerObservation> load_corner_observations(const std::string& path);

// Serialization helpers shared by the writers: 17 significant digits so
// save -> load round trips are exact.
std::string format_double(double value);

double parse_angle(const std::string& text);   // "0.3 rad" or "15 deg"
double parse_length_mm(const std::string& text);  // "12.5 mm"

}  // namespace uscal
