#include "salodom/saliency_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "salodom/error.hpp"

namespace salodom {

void CameraModel::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) fail(ErrorCode::InvalidArgument, "camera focal lengths must be positive");
    if (image_width <= 0 || image_height <= 0) fail(ErrorCode::InvalidArgument, "camera image size must be positive");
    if (!(cx >= 0.0 && cx < image_width && cy >= 0.0 && cy < image_height)) {
        fail(ErrorCode::InvalidArgument, "camera principal point outside the image");
    }
}

void GrayImage::validate() const {
    if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "image dimensions must be positive");
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        fail(ErrorCode::InvalidArgument, "image buffer size does not match its dimensions");
    }
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) fail(ErrorCode::InvalidArgument, "image value outside [0,1]");
    }
}

std::size_t PointSaliency::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

ImageProjection project_to_image(const PointCloud& cloud, const CameraModel& camera) {
    camera.validate();
    ImageProjection out;
    out.pixels.assign(cloud.size(), Eigen::Vector2d::Zero());
    out.visible.assign(cloud.size(), 0);
    const double max_u = camera.image_width - 1;
    const double max_v = camera.image_height - 1;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3 pc = camera.cam_from_lidar.apply(cloud.positions[i]);
        if (!(pc.z() > kNearPlane)) continue;
        const double u = camera.fx * pc.x() / pc.z() + camera.cx;
        const double v = camera.fy * pc.y() / pc.z() + camera.cy;
        out.pixels[i] = {u, v};
        out.visible[i] = (u >= 0.0 && u <= max_u && v >= 0.0 && v <= max_v) ? 1 : 0;
    }
    return out;
}

GrayImage fuse_annotators(std::span<const GrayImage> maps) {
    if (maps.empty()) fail(ErrorCode::InvalidArgument, "fuse_annotators: no saliency maps given");
    const GrayImage& first = maps.front();
    for (const auto& m : maps) {
        if (m.width != first.width || m.height != first.height) {
            fail(ErrorCode::InvalidArgument, "fuse_annotators: dimension mismatch (" + std::to_string(m.width) + "x" +
                                                 std::to_string(m.height) + " vs " + std::to_string(first.width) +
                                                 "x" + std::to_string(first.height) + ")");
        }
    }
    if (maps.size() == 1) return first;

    GrayImage out{first.width, first.height, std::vector<double>(first.values.size(), 0.0)};
    for (const auto& m : maps) {
        for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += m.values[k];
    }
    const double inv = 1.0 / static_cast<double>(maps.size());
    for (double& v : out.values) v *= inv;
    return out;
}

namespace {

double bilinear(const GrayImage& image, double u, double v) {
    const int x0 = std::clamp(static_cast<int>(std::floor(u)), 0, image.width - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(v)), 0, image.height - 1);
    const int x1 = std::min(x0 + 1, image.width - 1);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double ax = std::clamp(u - x0, 0.0, 1.0);
    const double ay = std::clamp(v - y0, 0.0, 1.0);
    const double top = (1.0 - ax) * image.at(x0, y0) + ax * image.at(x1, y0);
    const double bottom = (1.0 - ax) * image.at(x0, y1) + ax * image.at(x1, y1);
    return (1.0 - ay) * top + ay * bottom;
}

}  // namespace

PointSaliency sample_saliency(const GrayImage& image, const ImageProjection& projection) {
    PointSaliency out;
    out.values.assign(projection.pixels.size(), 0.0);
    out.valid.assign(projection.pixels.size(), 0);
    for (std::size_t i = 0; i < projection.pixels.size(); ++i) {
        if (!projection.visible[i]) continue;
        out.values[i] = bilinear(image, projection.pixels[i].x(), projection.pixels[i].y());
        out.valid[i] = 1;
    }
    return out;
}

PointSaliency normalize_saliency(const PointSaliency& saliency) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < saliency.size(); ++i) {
        if (!saliency.valid[i]) continue;
        lo = std::min(lo, saliency.values[i]);
        hi = std::max(hi, saliency.values[i]);
    }
    if (lo > hi) fail(ErrorCode::InvalidArgument, "no visible points");

    PointSaliency out = saliency;
    const double span = hi - lo;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!out.valid[i]) continue;
        out.values[i] = span > 0.0 ? (saliency.values[i] - lo) / span : 0.5;
    }
    return out;
}

PointSaliency transfer_saliency(const PointCloud& cloud, std::span<const CameraView> views) {
    if (views.empty()) fail(ErrorCode::InvalidArgument, "transfer_saliency: no camera views");
    std::vector<double> sum(cloud.size(), 0.0);
    std::vector<int> hits(cloud.size(), 0);
    for (const auto& view : views) {
        view.saliency.validate();
        if (view.saliency.width != view.camera.image_width || view.saliency.height != view.camera.image_height) {
            fail(ErrorCode::InvalidArgument, "saliency image size does not match the camera model");
        }
        const PointSaliency sampled = sample_saliency(view.saliency, project_to_image(cloud, view.camera));
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (!sampled.valid[i]) continue;
            sum[i] += sampled.values[i];
            ++hits[i];
        }
    }
    PointSaliency out;
    out.values.assign(cloud.size(), 0.0);
    out.valid.assign(cloud.size(), 0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (hits[i] == 0) continue;
        out.values[i] = sum[i] / hits[i];
        out.valid[i] = 1;
    }
    return out;
}

}  // namespace salodom
