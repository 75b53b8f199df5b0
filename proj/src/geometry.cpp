#include "salodom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "salodom/error.hpp"

namespace salodom {

namespace {

bool finite(const Vec3& p) { return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z()); }

constexpr double kSmallAngle = 1e-8;
constexpr double kLogSingularityMargin = 1e-6;

}  // namespace

void PointCloud::validate() const {
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!finite(positions[i])) {
            fail(ErrorCode::InvalidArgument, "invalid point: non-finite coordinate at index " + std::to_string(i));
        }
    }
    if (!intensity.empty() && intensity.size() != positions.size()) {
        fail(ErrorCode::InvalidArgument, "intensity channel length " + std::to_string(intensity.size()) +
                                             " does not match point count " + std::to_string(positions.size()));
    }
    for (const auto& [name, values] : channels) {
        if (values.size() != positions.size()) {
            fail(ErrorCode::InvalidArgument, "channel '" + name + "' length " + std::to_string(values.size()) +
                                                 " does not match point count " + std::to_string(positions.size()));
        }
    }
}

// ---------------------------------------------------------------------------
// RigidTransform

RigidTransform::RigidTransform(const Eigen::Quaterniond& rotation, const Vec3& translation)
    : rotation_(rotation.normalized()), translation_(translation) {}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(Eigen::Quaterniond(rotation).normalized()), translation_(translation) {}

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis, double angle, const Vec3& translation) {
    return {Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())), translation};
}

RigidTransform RigidTransform::from_matrix3x4(const double* m) {
    Mat3 R;
    R << m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10];
    return {R, Vec3(m[3], m[7], m[11])};
}

Eigen::Matrix4d RigidTransform::matrix() const {
    Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
    M.topLeftCorner<3, 3>() = rotation();
    M.topRightCorner<3, 1>() = translation_;
    return M;
}

void RigidTransform::to_matrix3x4(double* m) const {
    const Mat3 R = rotation();
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m[4 * r + c] = R(r, c);
        m[4 * r + 3] = translation_[r];
    }
}

RigidTransform RigidTransform::inverse() const {
    const Eigen::Quaterniond qi = rotation_.conjugate();
    return {qi, -(qi * translation_)};
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
    return {rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_};
}

double RigidTransform::angle() const {
    return 2.0 * std::atan2(rotation_.vec().norm(), std::abs(rotation_.w()));
}

// ---------------------------------------------------------------------------
// se(3)

Mat3 skew(const Vec3& v) {
    Mat3 S;
    S << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return S;
}

RigidTransform se3_exp(const Vec6& xi) {
    if (!xi.allFinite()) fail(ErrorCode::InvalidArgument, "se3_exp: non-finite tangent vector");
    const Vec3 omega = xi.head<3>();
    const Vec3 v = xi.tail<3>();
    const double theta = omega.norm();
    const Mat3 W = skew(omega);
    const Mat3 W2 = W * W;

    Eigen::Quaterniond q;
    Mat3 V;
    if (theta < kSmallAngle) {
        const double t2 = theta * theta;
        q.w() = 1.0 - t2 / 8.0;
        q.vec() = (0.5 - t2 / 48.0) * omega;
        V = Mat3::Identity() + 0.5 * W + W2 / 6.0;
    } else {
        const double half = 0.5 * theta;
        q.w() = std::cos(half);
        q.vec() = (std::sin(half) / theta) * omega;
        const double t2 = theta * theta;
        const double s = std::sin(half) / half;
        // 1 - cos and theta - sin both cancel badly for small theta.
        const double b = theta < 1e-2 ? 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 : (theta - std::sin(theta)) / (t2 * theta);
        V = Mat3::Identity() + (0.5 * s * s) * W + b * W2;
    }
    return {q, V * v};
}

Vec6 se3_log(const RigidTransform& T) {
    Eigen::Quaterniond q = T.quaternion();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const double vnorm = q.vec().norm();
    const double theta = 2.0 * std::atan2(vnorm, q.w());
    if (theta >= std::numbers::pi - kLogSingularityMargin) {
        fail(ErrorCode::Numeric, "rotation near log singularity");
    }

    Vec3 omega;
    if (vnorm < kSmallAngle) {
        omega = (2.0 / q.w()) * q.vec();
    } else {
        omega = (theta / vnorm) * q.vec();
    }

    // V^-1 = I - W/2 + c W^2 with c = (1 - (theta/2) cot(theta/2)) / theta^2.
    const Mat3 W = skew(omega);
    double c;
    if (theta < 1e-2) {
        const double t2 = theta * theta;
        c = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
    } else {
        const double half = 0.5 * theta;
        c = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
    }
    const Mat3 Vinv = Mat3::Identity() - 0.5 * W + c * W * W;

    Vec6 xi;
    xi.head<3>() = omega;
    xi.tail<3>() = Vinv * T.translation();
    return xi;
}

// ---------------------------------------------------------------------------
// Range images

void ProjectionParams::validate() const {
    if (height < 2 || width < 2) {
        fail(ErrorCode::InvalidArgument, "range image must be at least 2x2, got " + std::to_string(height) + "x" +
                                             std::to_string(width));
    }
    if (!(fov_up > fov_down)) fail(ErrorCode::InvalidArgument, "fov_up must exceed fov_down");
}

std::size_t RangeImage::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

PixelCoord spherical_pixel(const Vec3& p, const ProjectionParams& params) {
    const double r = p.norm();
    const double yaw = std::atan2(p.y(), p.x());
    const double pitch = std::asin(std::clamp(p.z() / r, -1.0, 1.0));
    const double fov = params.fov_up - params.fov_down;

    const double u = std::floor(0.5 * (1.0 - yaw / std::numbers::pi) * params.width);
    const double v = std::floor((1.0 - (pitch - params.fov_down) / fov) * params.height);
    const int col = static_cast<int>(std::clamp(u, 0.0, static_cast<double>(params.width - 1)));
    const int row = static_cast<int>(std::clamp(v, 0.0, static_cast<double>(params.height - 1)));
    return {row, col};
}

RangeImage spherical_project(const PointCloud& cloud, const ProjectionParams& params) {
    params.validate();
    if (cloud.empty()) fail(ErrorCode::InvalidArgument, "empty input");
    cloud.validate();

    RangeImage img;
    img.height = params.height;
    img.width = params.width;
    img.fov_up = params.fov_up;
    img.fov_down = params.fov_down;
    const std::size_t n_pix = static_cast<std::size_t>(params.height) * static_cast<std::size_t>(params.width);
    img.range.assign(n_pix, 0.0);
    img.xyz.assign(n_pix, Vec3::Zero());
    img.valid.assign(n_pix, 0);

    // Winning source point per pixel; sequential reduction keeps collisions deterministic.
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> owner(n_pix, kNone);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.positions[i];
        const double r = p.norm();
        if (r <= 0.0) continue;
        const PixelCoord px = spherical_pixel(p, params);
        const std::size_t k = img.index(px.row, px.col);
        if (owner[k] == kNone || r < img.range[k]) {
            owner[k] = i;
            img.range[k] = r;
            img.xyz[k] = p;
            img.valid[k] = 1;
        }
    }

    auto carry = [&](const std::string& name, const std::vector<double>& values) {
        auto& plane = img.channels[name];
        plane.assign(n_pix, 0.0);
        for (std::size_t k = 0; k < n_pix; ++k) {
            if (owner[k] != kNone) plane[k] = values[owner[k]];
        }
    };
    if (!cloud.intensity.empty()) carry("intensity", cloud.intensity);
    for (const auto& [name, values] : cloud.channels) carry(name, values);
    return img;
}

PointCloud unproject(const RangeImage& image) {
    PointCloud out;
    const std::size_t n = image.valid_count();
    out.positions.reserve(n);
    std::vector<std::size_t> pixels;
    pixels.reserve(n);
    for (std::size_t k = 0; k < image.pixel_count(); ++k) {
        if (!image.valid[k]) continue;
        out.positions.push_back(image.xyz[k]);
        pixels.push_back(k);
    }
    for (const auto& [name, plane] : image.channels) {
        std::vector<double> values(pixels.size());
        for (std::size_t i = 0; i < pixels.size(); ++i) values[i] = plane[pixels[i]];
        if (name == "intensity") {
            out.intensity = std::move(values);
        } else {
            out.channels.emplace(name, std::move(values));
        }
    }
    return out;
}

NormalMap estimate_normals(const RangeImage& image) {
    NormalMap out;
    out.height = image.height;
    out.width = image.width;
    out.normals.assign(image.pixel_count(), Vec3::Zero());
    out.valid.assign(image.pixel_count(), 0);

    for (int row = 0; row + 1 < image.height; ++row) {
        for (int col = 0; col + 1 < image.width; ++col) {
            const std::size_t k = image.index(row, col);
            const std::size_t right = image.index(row, col + 1);
            const std::size_t down = image.index(row + 1, col);
            if (!image.valid[k] || !image.valid[right] || !image.valid[down]) continue;

            const Vec3& p = image.xyz[k];
            Vec3 n = (image.xyz[right] - p).cross(image.xyz[down] - p);
            const double len = n.norm();
            if (len < 1e-12) continue;
            n /= len;
            if (n.dot(p) > 0.0) n = -n;
            out.normals[k] = n;
            out.valid[k] = 1;
        }
    }
    return out;
}

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& T) {
    PointCloud out = cloud;
    if (T.quaternion().coeffs() == Eigen::Quaterniond::Identity().coeffs() && T.translation().isZero(0.0)) {
        return out;
    }
    const Mat3 R = T.rotation();
    const Vec3& t = T.translation();
    for (auto& p : out.positions) p = R * p + t;
    return out;
}

NormalMap rotate_normals(const NormalMap& normals, const RigidTransform& T) {
    NormalMap out = normals;
    const Mat3 R = T.rotation();
    for (std::size_t k = 0; k < out.normals.size(); ++k) {
        if (out.valid[k]) out.normals[k] = R * out.normals[k];
    }
    return out;
}

}  // namespace salodom
