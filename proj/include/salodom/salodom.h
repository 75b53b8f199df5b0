/*
 * salodom C API.
 *
 * Every function returns a sod_status. On failure a one-line description is
 * available from sod_last_error() on the calling thread until the next call
 * into the library from that thread. Objects are opaque handles released with
 * their matching *_destroy function; destroy functions accept NULL.
 *
 * Poses cross the boundary as row-major 3x4 [R|t] arrays of 12 doubles, the
 * same layout as a line of a KITTI pose file.
 */
#ifndef SALODOM_SALODOM_H
#define SALODOM_SALODOM_H

#include <stddef.h>
#include <stdint.h>

#if defined(SALODOM_BUILDING_LIBRARY)
#define SOD_API __attribute__((visibility("default")))
#else
#define SOD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sod_status {
    SOD_OK = 0,
    SOD_ERR_INVALID_ARGUMENT = 1,
    SOD_ERR_IO = 2,
    SOD_ERR_FORMAT = 3,
    SOD_ERR_NUMERIC = 4,
    SOD_ERR_NO_CORRESPONDENCES = 5,
    SOD_ERR_DEGENERATE = 6,
    SOD_ERR_INTERNAL = 99
} sod_status;

typedef enum sod_weighting {
    SOD_WEIGHTING_NONE = 0,
    SOD_WEIGHTING_SALIENCY = 1,
    SOD_WEIGHTING_SEMANTIC = 2,
    SOD_WEIGHTING_BOTH = 3
} sod_weighting;

typedef struct sod_cloud sod_cloud;
typedef struct sod_frame sod_frame;
typedef struct sod_trajectory sod_trajectory;
typedef struct sod_array sod_array;
typedef struct sod_image sod_image;
typedef struct sod_label_table sod_label_table;

SOD_API const char* sod_version(void);
SOD_API const char* sod_last_error(void);
SOD_API const char* sod_status_name(sod_status status);

/* ---- arrays of doubles returned by the library ---- */
SOD_API size_t sod_array_size(const sod_array* array);
SOD_API const double* sod_array_data(const sod_array* array);
SOD_API void sod_array_destroy(sod_array* array);

/* ---- point clouds ---- */
SOD_API sod_status sod_cloud_create(const double* xyz, size_t count, sod_cloud** out);
SOD_API sod_status sod_cloud_read_kitti(const char* path, sod_cloud** out);
SOD_API sod_status sod_cloud_write_kitti(const sod_cloud* cloud, const char* path);
SOD_API void sod_cloud_destroy(sod_cloud* cloud);
SOD_API size_t sod_cloud_size(const sod_cloud* cloud);
/* Copies 3*size coordinates into xyz. */
SOD_API sod_status sod_cloud_positions(const sod_cloud* cloud, double* xyz);
SOD_API sod_status sod_cloud_transform(const sod_cloud* cloud, const double pose[12], sod_cloud** out);
/* Attaches or replaces a named per-point channel ("saliency", "semantic", ...). */
SOD_API sod_status sod_cloud_set_channel(sod_cloud* cloud, const char* name, const double* values, size_t count);
SOD_API sod_status sod_cloud_get_channel(const sod_cloud* cloud, const char* name, sod_array** out);
/* Reads a PTCH channel file, checks its count against the cloud, attaches it. */
SOD_API sod_status sod_cloud_load_channel(sod_cloud* cloud, const char* name, const char* path);
/* Reads a SemanticKITTI .label file, binarizes it with `table` and attaches it
 * as the "semantic" channel. */
SOD_API sod_status sod_cloud_load_semantics(sod_cloud* cloud, const char* label_path, const sod_label_table* table);

/* ---- per-point channel files ---- */
SOD_API sod_status sod_channel_read(const char* path, sod_array** out);
SOD_API sod_status sod_channel_write(const char* path, const double* values, size_t count);

/* ---- semantics ---- */
SOD_API sod_status sod_label_table_default(sod_label_table** out);
SOD_API sod_status sod_label_table_read(const char* path, sod_label_table** out);
/* Value for ignored/unlabeled classes (default 1.0). */
SOD_API sod_status sod_label_table_set_ignore_value(sod_label_table* table, double value);
SOD_API void sod_label_table_destroy(sod_label_table* table);
/* Raw label words (instance bits included) of a .label file. */
SOD_API sod_status sod_labels_read(const char* path, uint32_t** labels, size_t* count);
SOD_API void sod_labels_free(uint32_t* labels);
SOD_API sod_status sod_binarize_labels(const uint32_t* labels, size_t count, const sod_label_table* table,
                                       double* mask_out);
/* per_class_iou receives num_classes entries (NaN for absent classes). */
SOD_API sod_status sod_miou(const uint32_t* pred, const uint32_t* gt, size_t count, int num_classes,
                            const uint32_t* ignore, size_t ignore_count, double* per_class_iou, double* mean_iou);

/* ---- range-image frames for odometry ---- */
typedef struct sod_projection {
    int height;
    int width;
    double fov_up;   /* radians */
    double fov_down; /* radians */
} sod_projection;

SOD_API void sod_projection_default(sod_projection* params);
/* Spherical projection, range-image normals, then a registration frame. */
SOD_API sod_status sod_frame_from_cloud(const sod_cloud* cloud, const sod_projection* params, sod_frame** out);
SOD_API void sod_frame_destroy(sod_frame* frame);
SOD_API size_t sod_frame_size(const sod_frame* frame);

/* ---- odometry ---- */
typedef struct sod_odometry_config {
    double lambda;
    int max_iterations;
    double convergence_tol;
    double max_corr_dist;
    double huber_delta;
    sod_weighting weighting;
    int hard_mask;
    int source_stride;
} sod_odometry_config;

typedef struct sod_solve_diagnostics {
    double final_loss;
    int iterations;
    size_t pair_count;
    int converged;
} sod_solve_diagnostics;

SOD_API void sod_odometry_config_default(sod_odometry_config* config);
/* Applies a key=value config file on top of the given settings. */
SOD_API sod_status sod_config_load(const char* path, sod_odometry_config* config, sod_projection* params);
/* Writes the effective settings as key=value text; buffer may be NULL to query
 * the required size (including the terminating NUL). */
SOD_API sod_status sod_config_format(const sod_odometry_config* config, const sod_projection* params, char* buffer,
                                     size_t capacity, size_t* required);

/* Pose mapping `source` (scan t) into `target` (scan t-1). initial may be NULL. */
SOD_API sod_status sod_solve_frame_pair(const sod_frame* source, const sod_frame* target,
                                        const sod_odometry_config* config, const double initial[12],
                                        double pose_out[12], sod_solve_diagnostics* diagnostics);
/* Solves all consecutive pairs. constant_velocity=0 makes pairs independent
 * and lets them run on `threads` workers. relative_out receives 12*(count-1)
 * doubles and diagnostics_out (may be NULL) count-1 entries. */
SOD_API sod_status sod_run_sequence(const sod_frame* const* frames, size_t count, const sod_odometry_config* config,
                                    int constant_velocity, unsigned threads, double* relative_out,
                                    sod_solve_diagnostics* diagnostics_out);

/* ---- trajectories ---- */
SOD_API sod_status sod_trajectory_from_relative(const double* relative, size_t count, sod_trajectory** out);
SOD_API sod_status sod_trajectory_from_poses(const double* poses, size_t count, sod_trajectory** out);
SOD_API sod_status sod_trajectory_read(const char* path, sod_trajectory** out);
SOD_API sod_status sod_trajectory_write(const sod_trajectory* traj, const char* path);
SOD_API sod_status sod_trajectory_write_csv(const sod_trajectory* traj, const char* path);
SOD_API void sod_trajectory_destroy(sod_trajectory* traj);
SOD_API size_t sod_trajectory_size(const sod_trajectory* traj);
SOD_API sod_status sod_trajectory_pose(const sod_trajectory* traj, size_t index, double pose_out[12]);

/* ---- evaluation ---- */
#define SOD_SEGMENT_COUNT 8

typedef struct sod_eval_report {
    double t_rel; /* percent */
    double r_rel; /* deg / 100 m */
    size_t samples;
    int too_short;
    double segment_length[SOD_SEGMENT_COUNT];
    double segment_t_err[SOD_SEGMENT_COUNT];
    double segment_r_err[SOD_SEGMENT_COUNT];
    size_t segment_samples[SOD_SEGMENT_COUNT]; /* 0 where the length was not reached */
} sod_eval_report;

SOD_API sod_status sod_eval_kitti(const sod_trajectory* estimate, const sod_trajectory* ground_truth,
                                  sod_eval_report* report);
/* Text ("text") or CSV ("csv") rendering; same buffer protocol as sod_config_format. */
SOD_API sod_status sod_eval_format(const sod_trajectory* estimate, const sod_trajectory* ground_truth,
                                   const char* sequence, const char* format, char* buffer, size_t capacity,
                                   size_t* required);

typedef struct sod_saliency_scores {
    double cc;
    double sim;
    double kld;
} sod_saliency_scores;

/* valid arrays may be NULL, meaning every point is valid. */
SOD_API sod_status sod_saliency_scores_compute(const double* pred, const uint8_t* pred_valid, const double* gt,
                                               const uint8_t* gt_valid, size_t count, sod_saliency_scores* out);

/* ---- saliency transfer ---- */
typedef struct sod_camera {
    double fx, fy, cx, cy;
    int image_width, image_height;
    double cam_from_lidar[12];
} sod_camera;

SOD_API sod_status sod_camera_read_kitti_calib(const char* path, const char* camera_key, int image_width,
                                               int image_height, sod_camera* out);
SOD_API sod_status sod_image_read_pgm(const char* path, sod_image** out);
SOD_API sod_status sod_image_write_pgm(const sod_image* image, const char* path);
SOD_API void sod_image_destroy(sod_image* image);
SOD_API int sod_image_width(const sod_image* image);
SOD_API int sod_image_height(const sod_image* image);
/* Per-pixel mean of annotator maps. */
SOD_API sod_status sod_image_fuse(const sod_image* const* images, size_t count, sod_image** out);
/* Samples each camera's saliency image at the projected points (bilinear),
 * averages across cameras, and min-max normalizes when `normalize` is set.
 * Points no camera sees get value 0 and valid 0. valid_out may be NULL. */
SOD_API sod_status sod_transfer_saliency(const sod_cloud* cloud, const sod_camera* cameras,
                                         const sod_image* const* images, size_t count, int normalize,
                                         double* values_out, uint8_t* valid_out);

/* ---- plotting ---- */
/* trajectories[0..count) drawn in order with the given names. */
SOD_API sod_status sod_plot_svg(const sod_trajectory* const* trajectories, const char* const* names, size_t count,
                                const char* title, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* SALODOM_SALODOM_H */
