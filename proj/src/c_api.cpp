#include "salodom/salodom.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "salodom/error.hpp"
#include "salodom/evaluation.hpp"
#include "salodom/geometry.hpp"
#include "salodom/io.hpp"
#include "salodom/odometry.hpp"
#include "salodom/plot.hpp"
#include "salodom/saliency_transfer.hpp"
#include "salodom/semantics.hpp"

struct sod_cloud {
    salodom::PointCloud cloud;
};
struct sod_frame {
    salodom::Frame frame;
};
struct sod_trajectory {
    salodom::Trajectory traj;
};
struct sod_array {
    std::vector<double> values;
};
struct sod_image {
    salodom::GrayImage image;
};
struct sod_label_table {
    salodom::BinarizationTable table;
};

namespace {

using namespace salodom;

thread_local std::string g_last_error;

sod_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
            return SOD_ERR_INVALID_ARGUMENT;
        case ErrorCode::Io:
            return SOD_ERR_IO;
        case ErrorCode::Format:
            return SOD_ERR_FORMAT;
        case ErrorCode::Numeric:
            return SOD_ERR_NUMERIC;
        case ErrorCode::NoCorrespondences:
            return SOD_ERR_NO_CORRESPONDENCES;
        case ErrorCode::Degenerate:
            return SOD_ERR_DEGENERATE;
    }
    return SOD_ERR_INTERNAL;
}

template <typename Fn>
sod_status guarded(Fn&& fn) noexcept {
    g_last_error.clear();
    try {
        fn();
        return SOD_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SOD_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SOD_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SOD_ERR_INTERNAL;
    }
}

template <typename T>
void require(const T* p, const char* what) {
    if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

RigidTransform pose_from(const double* m) {
    for (int k = 0; k < 12; ++k) {
        if (!std::isfinite(m[k])) fail(ErrorCode::InvalidArgument, "pose has non-finite entries");
    }
    Mat3 R;
    R << m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10];
    if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6 || R.determinant() <= 0.0) {
        fail(ErrorCode::InvalidArgument, "pose rotation is not orthonormal");
    }
    return RigidTransform::from_matrix3x4(m);
}

WeightingMode to_mode(sod_weighting w) {
    switch (w) {
        case SOD_WEIGHTING_NONE:
            return WeightingMode::None;
        case SOD_WEIGHTING_SALIENCY:
            return WeightingMode::SaliencyOnly;
        case SOD_WEIGHTING_SEMANTIC:
            return WeightingMode::SemanticOnly;
        case SOD_WEIGHTING_BOTH:
            return WeightingMode::Both;
    }
    fail(ErrorCode::InvalidArgument, "unknown weighting mode " + std::to_string(static_cast<int>(w)));
}

sod_weighting from_mode(WeightingMode m) {
    switch (m) {
        case WeightingMode::None:
            return SOD_WEIGHTING_NONE;
        case WeightingMode::SaliencyOnly:
            return SOD_WEIGHTING_SALIENCY;
        case WeightingMode::SemanticOnly:
            return SOD_WEIGHTING_SEMANTIC;
        case WeightingMode::Both:
            return SOD_WEIGHTING_BOTH;
    }
    return SOD_WEIGHTING_NONE;
}

OdometryConfig to_config(const sod_odometry_config& c) {
    OdometryConfig cfg;
    cfg.lambda = c.lambda;
    cfg.max_iterations = c.max_iterations;
    cfg.convergence_tol = c.convergence_tol;
    cfg.max_corr_dist = c.max_corr_dist;
    cfg.huber_delta = c.huber_delta;
    cfg.weighting = to_mode(c.weighting);
    cfg.hard_mask = c.hard_mask != 0;
    cfg.source_stride = c.source_stride;
    cfg.validate();
    return cfg;
}

sod_odometry_config from_config(const OdometryConfig& cfg) {
    sod_odometry_config c;
    c.lambda = cfg.lambda;
    c.max_iterations = cfg.max_iterations;
    c.convergence_tol = cfg.convergence_tol;
    c.max_corr_dist = cfg.max_corr_dist;
    c.huber_delta = cfg.huber_delta;
    c.weighting = from_mode(cfg.weighting);
    c.hard_mask = cfg.hard_mask ? 1 : 0;
    c.source_stride = cfg.source_stride;
    return c;
}

ProjectionParams to_projection(const sod_projection& p) {
    ProjectionParams params;
    params.height = p.height;
    params.width = p.width;
    params.fov_up = p.fov_up;
    params.fov_down = p.fov_down;
    params.validate();
    return params;
}

sod_solve_diagnostics to_diagnostics(const SolveDiagnostics& d) {
    return {d.final_loss, d.iterations, d.pair_count, d.converged ? 1 : 0};
}

void copy_out(const std::string& text, char* buffer, std::size_t capacity, std::size_t* required) {
    if (required) *required = text.size() + 1;
    if (buffer == nullptr) return;
    if (capacity < text.size() + 1) fail(ErrorCode::InvalidArgument, "output buffer too small");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
}

CameraModel to_camera(const sod_camera& c) {
    CameraModel cam;
    cam.fx = c.fx;
    cam.fy = c.fy;
    cam.cx = c.cx;
    cam.cy = c.cy;
    cam.image_width = c.image_width;
    cam.image_height = c.image_height;
    cam.cam_from_lidar = pose_from(c.cam_from_lidar);
    cam.validate();
    return cam;
}

}  // namespace

extern "C" {

const char* sod_version(void) { return SALODOM_VERSION; }

const char* sod_last_error(void) { return g_last_error.c_str(); }

const char* sod_status_name(sod_status status) {
    switch (status) {
        case SOD_OK:
            return "ok";
        case SOD_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case SOD_ERR_IO:
            return "i/o error";
        case SOD_ERR_FORMAT:
            return "format error";
        case SOD_ERR_NUMERIC:
            return "numeric error";
        case SOD_ERR_NO_CORRESPONDENCES:
            return "no correspondences";
        case SOD_ERR_DEGENERATE:
            return "degenerate geometry";
        case SOD_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

// ---- arrays

size_t sod_array_size(const sod_array* array) { return array ? array->values.size() : 0; }
const double* sod_array_data(const sod_array* array) { return array ? array->values.data() : nullptr; }
void sod_array_destroy(sod_array* array) { delete array; }

// ---- clouds

sod_status sod_cloud_create(const double* xyz, size_t count, sod_cloud** out) {
    return guarded([&] {
        require(out, "out");
        if (count > 0) require(xyz, "xyz");
        auto c = std::make_unique<sod_cloud>();
        c->cloud.positions.resize(count);
        for (size_t i = 0; i < count; ++i) c->cloud.positions[i] = Vec3(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
        c->cloud.validate();
        *out = c.release();
    });
}

sod_status sod_cloud_read_kitti(const char* path, sod_cloud** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        auto c = std::make_unique<sod_cloud>();
        c->cloud = io::read_kitti_scan(path);
        *out = c.release();
    });
}

sod_status sod_cloud_write_kitti(const sod_cloud* cloud, const char* path) {
    return guarded([&] {
        require(cloud, "cloud");
        require(path, "path");
        io::write_kitti_scan(cloud->cloud, path);
    });
}

void sod_cloud_destroy(sod_cloud* cloud) { delete cloud; }

size_t sod_cloud_size(const sod_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

sod_status sod_cloud_positions(const sod_cloud* cloud, double* xyz) {
    return guarded([&] {
        require(cloud, "cloud");
        if (cloud->cloud.size() > 0) require(xyz, "xyz");
        for (size_t i = 0; i < cloud->cloud.size(); ++i) {
            for (int k = 0; k < 3; ++k) xyz[3 * i + static_cast<size_t>(k)] = cloud->cloud.positions[i][k];
        }
    });
}

sod_status sod_cloud_transform(const sod_cloud* cloud, const double pose[12], sod_cloud** out) {
    return guarded([&] {
        require(cloud, "cloud");
        require(pose, "pose");
        require(out, "out");
        auto c = std::make_unique<sod_cloud>();
        c->cloud = transform_cloud(cloud->cloud, pose_from(pose));
        *out = c.release();
    });
}

sod_status sod_cloud_set_channel(sod_cloud* cloud, const char* name, const double* values, size_t count) {
    return guarded([&] {
        require(cloud, "cloud");
        require(name, "name");
        if (count > 0) require(values, "values");
        if (count != cloud->cloud.size()) {
            fail(ErrorCode::InvalidArgument, std::string("channel '") + name + "' has " + std::to_string(count) +
                                                 " values for " + std::to_string(cloud->cloud.size()) + " points");
        }
        cloud->cloud.channels[name] = std::vector<double>(values, values + count);
    });
}

sod_status sod_cloud_get_channel(const sod_cloud* cloud, const char* name, sod_array** out) {
    return guarded([&] {
        require(cloud, "cloud");
        require(name, "name");
        require(out, "out");
        const auto it = cloud->cloud.channels.find(name);
        if (it == cloud->cloud.channels.end()) fail(ErrorCode::InvalidArgument, std::string("no channel '") + name + "'");
        *out = new sod_array{it->second};
    });
}

sod_status sod_cloud_load_channel(sod_cloud* cloud, const char* name, const char* path) {
    return guarded([&] {
        require(cloud, "cloud");
        require(name, "name");
        require(path, "path");
        cloud->cloud.channels[name] = io::read_point_channel(path, cloud->cloud.size());
    });
}

sod_status sod_cloud_load_semantics(sod_cloud* cloud, const char* label_path, const sod_label_table* table) {
    return guarded([&] {
        require(cloud, "cloud");
        require(label_path, "label_path");
        require(table, "table");
        const SemanticMap sem = io::read_labels(label_path, cloud->cloud.size());
        try {
            cloud->cloud.channels[kSemanticChannel] = binarize_semantics(sem, table->table).values;
        } catch (const Error& e) {
            throw Error(e.code(), std::string(label_path) + ": " + e.what());
        }
    });
}

// ---- channel files

sod_status sod_channel_read(const char* path, sod_array** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new sod_array{io::read_point_channel(path)};
    });
}

sod_status sod_channel_write(const char* path, const double* values, size_t count) {
    return guarded([&] {
        require(path, "path");
        if (count > 0) require(values, "values");
        io::write_point_channel(std::span<const double>(values, count), path);
    });
}

// ---- semantics

sod_status sod_label_table_default(sod_label_table** out) {
    return guarded([&] {
        require(out, "out");
        *out = new sod_label_table{BinarizationTable::semantic_kitti()};
    });
}

sod_status sod_label_table_read(const char* path, sod_label_table** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new sod_label_table{io::read_label_table(path)};
    });
}

sod_status sod_label_table_set_ignore_value(sod_label_table* table, double value) {
    return guarded([&] {
        require(table, "table");
        if (!(value >= 0.0 && value <= 1.0)) fail(ErrorCode::InvalidArgument, "ignore value must lie in [0,1]");
        table->table.ignore_value = value;
    });
}

void sod_label_table_destroy(sod_label_table* table) { delete table; }

sod_status sod_labels_read(const char* path, uint32_t** labels, size_t* count) {
    return guarded([&] {
        require(path, "path");
        require(labels, "labels");
        require(count, "count");
        const std::vector<std::uint32_t> words = io::read_label_words(path);
        auto buf = std::make_unique<uint32_t[]>(std::max<size_t>(words.size(), 1));
        std::copy(words.begin(), words.end(), buf.get());
        *count = words.size();
        *labels = buf.release();
    });
}

void sod_labels_free(uint32_t* labels) { delete[] labels; }

sod_status sod_binarize_labels(const uint32_t* labels, size_t count, const sod_label_table* table, double* mask_out) {
    return guarded([&] {
        require(table, "table");
        if (count > 0) {
            require(labels, "labels");
            require(mask_out, "mask_out");
        }
        std::vector<std::uint32_t> classes(labels, labels + count);
        for (auto& l : classes) l &= 0xFFFFu;
        const BinaryMask mask = binarize_semantics(std::span<const std::uint32_t>(classes), table->table);
        std::copy(mask.values.begin(), mask.values.end(), mask_out);
    });
}

sod_status sod_miou(const uint32_t* pred, const uint32_t* gt, size_t count, int num_classes, const uint32_t* ignore,
                    size_t ignore_count, double* per_class_iou, double* mean_iou) {
    return guarded([&] {
        if (count > 0) {
            require(pred, "pred");
            require(gt, "gt");
        }
        if (ignore_count > 0) require(ignore, "ignore");
        require(mean_iou, "mean_iou");
        const std::set<std::uint32_t> ignored(ignore, ignore + ignore_count);
        const MiouResult r = miou(std::span<const std::uint32_t>(pred, count),
                                  std::span<const std::uint32_t>(gt, count), num_classes, ignored);
        if (per_class_iou) std::copy(r.per_class.begin(), r.per_class.end(), per_class_iou);
        *mean_iou = r.mean;
    });
}

// ---- frames

void sod_projection_default(sod_projection* params) {
    if (params == nullptr) return;
    const ProjectionParams d;
    *params = {d.height, d.width, d.fov_up, d.fov_down};
}

sod_status sod_frame_from_cloud(const sod_cloud* cloud, const sod_projection* params, sod_frame** out) {
    return guarded([&] {
        require(cloud, "cloud");
        require(out, "out");
        ProjectionParams p;
        if (params) p = to_projection(*params);
        const RangeImage image = spherical_project(cloud->cloud, p);
        auto f = std::make_unique<sod_frame>();
        f->frame = make_frame(image, estimate_normals(image));
        *out = f.release();
    });
}

void sod_frame_destroy(sod_frame* frame) { delete frame; }

size_t sod_frame_size(const sod_frame* frame) { return frame ? frame->frame.size() : 0; }

// ---- odometry

void sod_odometry_config_default(sod_odometry_config* config) {
    if (config) *config = from_config(OdometryConfig{});
}

sod_status sod_config_load(const char* path, sod_odometry_config* config, sod_projection* params) {
    return guarded([&] {
        require(path, "path");
        require(config, "config");
        require(params, "params");
        OdometryConfig cfg = to_config(*config);
        ProjectionParams proj = to_projection(*params);
        io::apply_config_file(path, cfg, proj);
        cfg.validate();
        proj.validate();
        *config = from_config(cfg);
        *params = {proj.height, proj.width, proj.fov_up, proj.fov_down};
    });
}

sod_status sod_config_format(const sod_odometry_config* config, const sod_projection* params, char* buffer,
                             size_t capacity, size_t* required) {
    return guarded([&] {
        require(config, "config");
        require(params, "params");
        copy_out(io::format_config(to_config(*config), to_projection(*params)), buffer, capacity, required);
    });
}

sod_status sod_solve_frame_pair(const sod_frame* source, const sod_frame* target, const sod_odometry_config* config,
                                const double initial[12], double pose_out[12], sod_solve_diagnostics* diagnostics) {
    return guarded([&] {
        require(source, "source");
        require(target, "target");
        require(config, "config");
        require(pose_out, "pose_out");
        const RigidTransform init = initial ? pose_from(initial) : RigidTransform::identity();
        const SolveResult r = solve_frame_pair(source->frame, target->frame, to_config(*config), init);
        r.transform.to_matrix3x4(pose_out);
        if (diagnostics) *diagnostics = to_diagnostics(r.diagnostics);
    });
}

sod_status sod_run_sequence(const sod_frame* const* frames, size_t count, const sod_odometry_config* config,
                            int constant_velocity, unsigned threads, double* relative_out,
                            sod_solve_diagnostics* diagnostics_out) {
    return guarded([&] {
        require(config, "config");
        if (count > 0) require(frames, "frames");
        if (count > 1) require(relative_out, "relative_out");
        std::vector<Frame> copies;
        copies.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            require(frames[i], "frame");
            copies.push_back(frames[i]->frame);
        }
        const SequenceResult r = run_sequence(copies, to_config(*config), constant_velocity != 0, threads);
        for (size_t k = 0; k < r.relative.size(); ++k) {
            r.relative[k].to_matrix3x4(relative_out + 12 * k);
            if (diagnostics_out) diagnostics_out[k] = to_diagnostics(r.diagnostics[k]);
        }
    });
}

// ---- trajectories

sod_status sod_trajectory_from_relative(const double* relative, size_t count, sod_trajectory** out) {
    return guarded([&] {
        require(out, "out");
        if (count > 0) require(relative, "relative");
        std::vector<RigidTransform> rel;
        rel.reserve(count);
        for (size_t k = 0; k < count; ++k) rel.push_back(pose_from(relative + 12 * k));
        *out = new sod_trajectory{accumulate_trajectory(rel)};
    });
}

sod_status sod_trajectory_from_poses(const double* poses, size_t count, sod_trajectory** out) {
    return guarded([&] {
        require(out, "out");
        if (count > 0) require(poses, "poses");
        auto t = std::make_unique<sod_trajectory>();
        for (size_t k = 0; k < count; ++k) t->traj.poses.push_back(pose_from(poses + 12 * k));
        *out = t.release();
    });
}

sod_status sod_trajectory_read(const char* path, sod_trajectory** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new sod_trajectory{io::read_poses(path)};
    });
}

sod_status sod_trajectory_write(const sod_trajectory* traj, const char* path) {
    return guarded([&] {
        require(traj, "traj");
        require(path, "path");
        io::write_poses(traj->traj, path);
    });
}

sod_status sod_trajectory_write_csv(const sod_trajectory* traj, const char* path) {
    return guarded([&] {
        require(traj, "traj");
        require(path, "path");
        io::write_text(path, io::format_trajectory_csv(traj->traj));
    });
}

void sod_trajectory_destroy(sod_trajectory* traj) { delete traj; }

size_t sod_trajectory_size(const sod_trajectory* traj) { return traj ? traj->traj.size() : 0; }

sod_status sod_trajectory_pose(const sod_trajectory* traj, size_t index, double pose_out[12]) {
    return guarded([&] {
        require(traj, "traj");
        require(pose_out, "pose_out");
        if (index >= traj->traj.size()) fail(ErrorCode::InvalidArgument, "pose index out of range");
        traj->traj.poses[index].to_matrix3x4(pose_out);
    });
}

// ---- evaluation

sod_status sod_eval_kitti(const sod_trajectory* estimate, const sod_trajectory* ground_truth,
                          sod_eval_report* report) {
    return guarded([&] {
        require(estimate, "estimate");
        require(ground_truth, "ground_truth");
        require(report, "report");
        const EvalReport r = kitti_relative_errors(estimate->traj, ground_truth->traj);
        sod_eval_report out{};
        out.t_rel = r.t_rel;
        out.r_rel = r.r_rel;
        out.samples = r.samples;
        out.too_short = r.too_short ? 1 : 0;
        for (std::size_t i = 0; i < kKittiSegmentLengths.size(); ++i) out.segment_length[i] = kKittiSegmentLengths[i];
        for (const auto& seg : r.breakdown) {
            for (std::size_t i = 0; i < kKittiSegmentLengths.size(); ++i) {
                if (kKittiSegmentLengths[i] != seg.length) continue;
                out.segment_t_err[i] = seg.t_err;
                out.segment_r_err[i] = seg.r_err;
                out.segment_samples[i] = seg.samples;
            }
        }
        *report = out;
    });
}

sod_status sod_eval_format(const sod_trajectory* estimate, const sod_trajectory* ground_truth, const char* sequence,
                           const char* format, char* buffer, size_t capacity, size_t* required) {
    return guarded([&] {
        require(estimate, "estimate");
        require(ground_truth, "ground_truth");
        require(format, "format");
        const EvalReport r = kitti_relative_errors(estimate->traj, ground_truth->traj, sequence ? sequence : "");
        const std::string fmt = format;
        if (fmt == "text") {
            copy_out(format_report_text(r), buffer, capacity, required);
        } else if (fmt == "csv") {
            copy_out(format_report_csv(r), buffer, capacity, required);
        } else {
            fail(ErrorCode::InvalidArgument, "unknown report format '" + fmt + "'");
        }
    });
}

sod_status sod_saliency_scores_compute(const double* pred, const uint8_t* pred_valid, const double* gt,
                                       const uint8_t* gt_valid, size_t count, sod_saliency_scores* out) {
    return guarded([&] {
        require(out, "out");
        if (count > 0) {
            require(pred, "pred");
            require(gt, "gt");
        }
        PointSaliency p, g;
        p.values.assign(pred, pred + count);
        g.values.assign(gt, gt + count);
        p.valid = pred_valid ? std::vector<std::uint8_t>(pred_valid, pred_valid + count)
                             : std::vector<std::uint8_t>(count, 1);
        g.valid = gt_valid ? std::vector<std::uint8_t>(gt_valid, gt_valid + count) : std::vector<std::uint8_t>(count, 1);
        const SaliencyScores s = saliency_scores(p, g);
        *out = {s.cc, s.sim, s.kld};
    });
}

// ---- saliency transfer

sod_status sod_camera_read_kitti_calib(const char* path, const char* camera_key, int image_width, int image_height,
                                       sod_camera* out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        const CameraModel cam = io::read_kitti_calib(path, image_width, image_height, camera_key ? camera_key : "P2");
        out->fx = cam.fx;
        out->fy = cam.fy;
        out->cx = cam.cx;
        out->cy = cam.cy;
        out->image_width = cam.image_width;
        out->image_height = cam.image_height;
        cam.cam_from_lidar.to_matrix3x4(out->cam_from_lidar);
    });
}

sod_status sod_image_read_pgm(const char* path, sod_image** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new sod_image{io::read_pgm(path)};
    });
}

sod_status sod_image_write_pgm(const sod_image* image, const char* path) {
    return guarded([&] {
        require(image, "image");
        require(path, "path");
        io::write_pgm(image->image, path);
    });
}

void sod_image_destroy(sod_image* image) { delete image; }
int sod_image_width(const sod_image* image) { return image ? image->image.width : 0; }
int sod_image_height(const sod_image* image) { return image ? image->image.height : 0; }

sod_status sod_image_fuse(const sod_image* const* images, size_t count, sod_image** out) {
    return guarded([&] {
        require(out, "out");
        if (count > 0) require(images, "images");
        std::vector<GrayImage> maps;
        maps.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            require(images[i], "image");
            maps.push_back(images[i]->image);
        }
        *out = new sod_image{fuse_annotators(maps)};
    });
}

sod_status sod_transfer_saliency(const sod_cloud* cloud, const sod_camera* cameras, const sod_image* const* images,
                                 size_t count, int normalize, double* values_out, uint8_t* valid_out) {
    return guarded([&] {
        require(cloud, "cloud");
        if (count > 0) {
            require(cameras, "cameras");
            require(images, "images");
        }
        if (cloud->cloud.size() > 0) require(values_out, "values_out");
        std::vector<CameraView> views;
        views.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            require(images[i], "image");
            views.push_back(CameraView{to_camera(cameras[i]), images[i]->image});
        }
        PointSaliency s = transfer_saliency(cloud->cloud, views);
        if (normalize) s = normalize_saliency(s);
        std::copy(s.values.begin(), s.values.end(), values_out);
        if (valid_out) std::copy(s.valid.begin(), s.valid.end(), valid_out);
    });
}

// ---- plotting

sod_status sod_plot_svg(const sod_trajectory* const* trajectories, const char* const* names, size_t count,
                        const char* title, const char* path) {
    return guarded([&] {
        require(path, "path");
        if (count > 0) require(trajectories, "trajectories");
        std::vector<NamedTrajectory> items;
        for (size_t i = 0; i < count; ++i) {
            require(trajectories[i], "trajectory");
            const std::string name = names && names[i] ? names[i] : "trajectory " + std::to_string(i);
            items.push_back({name, &trajectories[i]->traj});
        }
        PlotOptions opts;
        if (title) opts.title = title;
        io::write_text(path, render_trajectory_svg(items, opts));
    });
}

}  // extern "C"
