#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace salodom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Named per-point (or per-pixel) scalar arrays.
using ChannelMap = std::map<std::string, std::vector<double>>;

inline constexpr const char* kSaliencyChannel = "saliency";
inline constexpr const char* kSemanticChannel = "semantic";

struct PointCloud {
    std::vector<Vec3> positions;
    /// Empty, or one reflectance value in [0,1] per point.
    std::vector<double> intensity;
    ChannelMap channels;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }

    bool has_channel(const std::string& name) const { return channels.count(name) != 0; }

    /// Throws InvalidArgument on non-finite coordinates or mis-sized channels.
    void validate() const;
};

/// SE(3) pose stored as a unit quaternion plus translation.
///
/// Composition follows the usual matrix convention: (a * b).apply(p) ==
/// a.apply(b.apply(p)).
class RigidTransform {
public:
    RigidTransform() = default;
    RigidTransform(const Eigen::Quaterniond& rotation, const Vec3& translation);
    RigidTransform(const Mat3& rotation, const Vec3& translation);

    static RigidTransform identity() { return {}; }
    static RigidTransform from_translation(const Vec3& t) {
        return {Eigen::Quaterniond::Identity(), t};
    }
    static RigidTransform from_axis_angle(const Vec3& axis, double angle,
                                          const Vec3& translation = Vec3::Zero());
    /// Row-major 3x4 [R|t], as stored in KITTI pose files.
    static RigidTransform from_matrix3x4(const double* m);

    const Eigen::Quaterniond& quaternion() const { return rotation_; }
    const Vec3& translation() const { return translation_; }
    Mat3 rotation() const { return rotation_.toRotationMatrix(); }
    Eigen::Matrix4d matrix() const;
    void to_matrix3x4(double* m) const;

    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
    Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

    RigidTransform inverse() const;
    RigidTransform operator*(const RigidTransform& rhs) const;

    /// Rotation angle in [0, pi].
    double angle() const;

private:
    Eigen::Quaterniond rotation_ = Eigen::Quaterniond::Identity();
    Vec3 translation_ = Vec3::Zero();
};

/// Exponential map; xi = (omega, v) with rotation first.
RigidTransform se3_exp(const Vec6& xi);
/// Inverse of se3_exp. Throws Numeric when the rotation angle is within 1e-6 of pi.
Vec6 se3_log(const RigidTransform& T);

Mat3 skew(const Vec3& v);

struct ProjectionParams {
    int height = 64;
    int width = 720;
    double fov_up = 3.0 * std::numbers::pi / 180.0;
    double fov_down = -25.0 * std::numbers::pi / 180.0;

    void validate() const;
};

/// Spherical projection of a scan. Pixels are stored row-major.
struct RangeImage {
    int height = 0;
    int width = 0;
    double fov_up = 0.0;
    double fov_down = 0.0;
    std::vector<double> range;  // 0 marks an empty pixel
    std::vector<Vec3> xyz;
    std::vector<std::uint8_t> valid;
    ChannelMap channels;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(col);
    }
    std::size_t pixel_count() const { return range.size(); }
    std::size_t valid_count() const;
};

struct NormalMap {
    int height = 0;
    int width = 0;
    std::vector<Vec3> normals;
    std::vector<std::uint8_t> valid;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(col);
    }
};

/// Pixel coordinates a point falls into under `params`, clamped to the image.
struct PixelCoord {
    int row;
    int col;
};
PixelCoord spherical_pixel(const Vec3& p, const ProjectionParams& params);

RangeImage spherical_project(const PointCloud& cloud, const ProjectionParams& params);
PointCloud unproject(const RangeImage& image);
NormalMap estimate_normals(const RangeImage& image);

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& T);
NormalMap rotate_normals(const NormalMap& normals, const RigidTransform& T);

}  // namespace salodom
