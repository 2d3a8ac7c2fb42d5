/* uscal: freehand ultrasound probe calibration toolkit.
 *
 * C API over the C++ core: opaque handles, integer status codes, and a
 * per-thread error message retrievable with uscal_last_error().
 */
#ifndef USCAL_H
#define USCAL_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uscal_status {
    USCAL_OK = 0,
    USCAL_E_INVALID_ARGUMENT,
    USCAL_E_PARSE,
    USCAL_E_MISSING_FILE,
    USCAL_E_UNIT,
    USCAL_E_IO,
    USCAL_E_DEGENERATE_INPUT,
    USCAL_E_NUMERICAL_FAILURE,
    USCAL_E_NO_CIRCLE_FOUND,
    USCAL_E_AMBIGUOUS_PEAK,
    USCAL_E_NO_INTERSECTION,
    USCAL_E_UNKNOWN_LABEL,
    USCAL_E_BEHIND_CAMERA,
    USCAL_E_DEGENERATE_TARGET,
    USCAL_E_DIVERGED_REFINEMENT,
    USCAL_E_TOO_FEW_INLIERS,
    USCAL_E_INTERNAL
} uscal_status;

/* Message for the most recent failing call on this thread. */
const char* uscal_last_error(void);
/* Stable identifier for a status code, e.g. "E_PARSE". */
const char* uscal_status_name(int status);
const char* uscal_version(void);

/* Unit quaternion (w x y z), translation in mm, uniform scale. */
typedef struct uscal_transform {
    double qw, qx, qy, qz;
    double tx, ty, tz;
    double scale;
} uscal_transform;

typedef struct uscal_dataset uscal_dataset;
typedef struct uscal_result uscal_result;

#define USCAL_MODE_RIGID 0
#define USCAL_MODE_SIMILARITY 1

#define USCAL_ARTIFACTS_NONE 0
#define USCAL_ARTIFACTS_SPECKLE 1
#define USCAL_ARTIFACTS_SPECKLE_WALLS 2

/* ---- datasets -------------------------------------------------------- */

int uscal_dataset_load(const char* path, uscal_dataset** out);
int uscal_dataset_save(const uscal_dataset* ds, const char* path);
int uscal_dataset_frame_count(const uscal_dataset* ds);
void uscal_dataset_free(uscal_dataset* ds);

/* ---- synthetic generation -------------------------------------------- */

typedef struct uscal_generate_config {
    int n_frames;
    uint64_t seed;
    double rot_x_min_rad, rot_x_max_rad;
    double rot_y_min_rad, rot_y_max_rad;
    double rot_z_rad;
    double image_x_min_mm, image_x_max_mm;
    double image_y_min_mm, image_y_max_mm;
    double sigma_t_mm;
    double sigma_rot_rad;
    double sigma_px;
    uscal_transform t_um_true;
    uscal_transform t_pc_true;
    double feature_mm[3];          /* phantom feature (sphere center) */
    double hemisphere_radius_mm;
    double container_mm[3];
    int image_width_px, image_height_px;
    double scale_x_mm_per_px, scale_y_mm_per_px;
    int render_images;             /* write B-scans into the dataset */
    int artifacts;                 /* USCAL_ARTIFACTS_* */
} uscal_generate_config;

/* Fills a config with the toolkit defaults (hemisphere preset, no noise). */
int uscal_generate_config_defaults(uscal_generate_config* cfg);
int uscal_generate(const uscal_generate_config* cfg, uscal_dataset** out);

/* CSV rows "sigma,residual_std,trials" are written to csv_path; pass NULL to
 * receive values through residual_std_out (length n_sigmas) only. */
int uscal_noise_study(const uscal_generate_config* cfg, const double* sigmas, int n_sigmas,
                      int trials, double* residual_std_out, const char* csv_path);

/* ---- calibration ------------------------------------------------------ */

int uscal_calibrate(const uscal_dataset* ds, int mode, uscal_result** out);
/* threshold_mm <= 0 disables filtering. Filtering is single-pass. */
int uscal_evaluate(const uscal_dataset* ds, int mode, double threshold_mm, uscal_result** out);

int uscal_result_transform(const uscal_result* r, uscal_transform* out);
int uscal_result_frame_count(const uscal_result* r);
int uscal_result_frame_bre(const uscal_result* r, int index, int* frame_id, double bre_mm[3]);
int uscal_result_stats(const uscal_result* r, double mean_mm[3], double stddev_mm[3],
                       double min_mm[3], double max_mm[3]);
int uscal_result_save(const uscal_result* r, const char* path);
void uscal_result_free(uscal_result* r);

/* Horn solution vs the independent SVD oracle on the same dataset. */
int uscal_cross_check(const uscal_dataset* ds, int mode, uscal_transform* horn,
                      uscal_transform* svd, double* rms_horn_mm, double* rms_svd_mm);

/* ---- B-scan feature detection ----------------------------------------- */

int uscal_detect_circle(const unsigned char* pixels, int width, int height, double r_min_px,
                        double r_max_px, double* center_u, double* center_v, double* radius_px,
                        double* score);
int uscal_detect_circle_pgm(const char* path, double r_min_px, double r_max_px, double* center_u,
                            double* center_v, double* radius_px, double* score);

/* ---- planar fiducial pose --------------------------------------------- */

/* intrinsics = {fx, fy, cx, cy} in pixels; target_xy_mm and observations_uv_px
 * are n_points pairs in matching order. */
int uscal_estimate_planar_pose(const double intrinsics[4], const double* target_xy_mm,
                               int n_points, const double* observations_uv_px,
                               uscal_transform* pose, double* rms_px, int* iterations);

/* File-based variant: intrinsics key/value file, target CSV
 * "point_index,x_mm,y_mm", corners CSV "frame_id,point_index,u,v"; estimates
 * one pose per frame id and writes "frame_id,qw,qx,qy,qz,tx,ty,tz,rms_px"
 * rows to out_csv. */
int uscal_estimate_planar_pose_files(const char* intrinsics_path, const char* target_path,
                                     const char* corners_path, const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* USCAL_H */
