#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salodom/geometry.hpp"
#include "salodom/odometry.hpp"
#include "salodom/saliency_transfer.hpp"
#include "salodom/semantics.hpp"

namespace salodom::io {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_bytes(const fs::path& path);
void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes);
std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

// KITTI velodyne scans: little-endian float32 x, y, z, intensity per point.
PointCloud parse_kitti_scan(std::span<const std::uint8_t> bytes);
PointCloud read_kitti_scan(const fs::path& path);
std::vector<std::uint8_t> encode_kitti_scan(const PointCloud& cloud);
void write_kitti_scan(const PointCloud& cloud, const fs::path& path);

// KITTI pose files: one row-major 3x4 [R|t] per line, world-from-frame.
Trajectory parse_poses(const std::string& text);
Trajectory read_poses(const fs::path& path);
std::string format_poses(const Trajectory& traj);
void write_poses(const Trajectory& traj, const fs::path& path);

// SemanticKITTI labels: little-endian u32, class in the lower 16 bits.
std::vector<std::uint32_t> parse_label_words(std::span<const std::uint8_t> bytes);
std::vector<std::uint32_t> read_label_words(const fs::path& path);
std::vector<std::uint8_t> encode_label_words(std::span<const std::uint32_t> words);
void write_label_words(std::span<const std::uint32_t> words, const fs::path& path);
SemanticMap read_labels(const fs::path& path, std::optional<std::size_t> expected_count = std::nullopt);

/// `name id {dynamic|static|ignore}` per line; '#' starts a comment.
BinarizationTable parse_label_table(const std::string& text);
BinarizationTable read_label_table(const fs::path& path);

// Per-point channel files: "PTCH", u32 version, u64 count, count float32.
inline constexpr std::uint32_t kChannelVersion = 1;
inline constexpr std::size_t kChannelHeaderSize = 16;
std::vector<double> parse_point_channel(std::span<const std::uint8_t> bytes,
                                        std::optional<std::size_t> expected_count = std::nullopt);
std::vector<double> read_point_channel(const fs::path& path, std::optional<std::size_t> expected_count = std::nullopt);
std::vector<std::uint8_t> encode_point_channel(std::span<const double> values);
void write_point_channel(std::span<const double> values, const fs::path& path);

// Binary PGM (P5, maxval 255). Values map to [0,1] as v/255.
GrayImage parse_pgm(std::span<const std::uint8_t> bytes);
GrayImage read_pgm(const fs::path& path);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
void write_pgm(const GrayImage& image, const fs::path& path);

/// KITTI odometry calib.txt: camera intrinsics from P2, extrinsics from Tr.
CameraModel parse_kitti_calib(const std::string& text, int image_width, int image_height,
                              const std::string& camera_key = "P2");
CameraModel read_kitti_calib(const fs::path& path, int image_width, int image_height,
                             const std::string& camera_key = "P2");

/// key=value settings for the odometry run. Unknown keys are an error.
void apply_config_text(const std::string& text, OdometryConfig& odom, ProjectionParams& projection);
void apply_config_file(const fs::path& path, OdometryConfig& odom, ProjectionParams& projection);
std::string format_config(const OdometryConfig& odom, const ProjectionParams& projection);

/// frame,x,y,z per pose.
std::string format_trajectory_csv(const Trajectory& traj);

/// KITTI / SemanticKITTI sequence directory layout.
struct DatasetLayout {
    fs::path root;
    fs::path scan_dir;
    fs::path label_dir;
    fs::path saliency_dir;
    fs::path calib_file;
    fs::path pose_file;

    static DatasetLayout kitti(const fs::path& sequence_root);
};

struct FrameFiles {
    std::string stem;
    fs::path scan;
    fs::path label;     // empty when labels were not requested
    fs::path saliency;  // empty when saliency was not requested
};

/// Scans sorted lexicographically; requested channels must exist for every scan.
std::vector<FrameFiles> list_frames(const DatasetLayout& layout, bool with_labels, bool with_saliency);

}  // namespace salodom::io
