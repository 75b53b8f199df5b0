#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "salodom/geometry.hpp"

namespace salodom {

/// Pinhole camera rigidly mounted relative to the LiDAR.
struct CameraModel {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int image_width = 0;
    int image_height = 0;
    RigidTransform cam_from_lidar;

    void validate() const;
};

/// Grayscale image with values in [0,1], row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
    void validate() const;
};

/// Per-point saliency; `valid` is false for points no camera saw.
struct PointSaliency {
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    std::size_t size() const { return values.size(); }
    std::size_t valid_count() const;
};

struct ImageProjection {
    std::vector<Eigen::Vector2d> pixels;
    std::vector<std::uint8_t> visible;
};

/// Points closer than this along the optical axis are treated as not visible.
inline constexpr double kNearPlane = 0.1;

/// Pixel coordinates use the pixel-center convention: pixel (x, y) has its
/// center at (x, y), so in-bounds means 0 <= u <= width-1 and 0 <= v <= height-1.
ImageProjection project_to_image(const PointCloud& cloud, const CameraModel& camera);

/// Per-pixel mean of several annotators' maps.
GrayImage fuse_annotators(std::span<const GrayImage> maps);

/// Bilinear lookup at each visible point; invisible points get 0 and valid=false.
PointSaliency sample_saliency(const GrayImage& image, const ImageProjection& projection);

/// Min-max normalization over valid points. A constant input maps to 0.5.
PointSaliency normalize_saliency(const PointSaliency& saliency);

struct CameraView {
    CameraModel camera;
    GrayImage saliency;
};

/// Full image-to-point transfer. Points seen by several cameras receive the
/// mean of their samples. The result is not normalized.
PointSaliency transfer_saliency(const PointCloud& cloud, std::span<const CameraView> views);

}  // namespace salodom
