#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "salodom/geometry.hpp"
#include "salodom/odometry.hpp"

namespace salodom::testing {

/// Points on planar surfaces around the sensor with exact, sensor-facing normals.
struct SyntheticScene {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<std::uint8_t> dynamic;  // 1 for points of the moving cluster
};

/// Ground, a few walls and boxes; `dynamic_fraction` of the points lie on a
/// car-sized box that is flagged dynamic.
SyntheticScene make_scene(std::mt19937_64& rng, std::size_t n_points, double dynamic_fraction = 0.0);

/// Random motion with |t| <= max_translation and angle <= max_angle.
RigidTransform random_motion(std::mt19937_64& rng, double max_translation, double max_angle);

/// Frame from the scene with the given saliency value for every point and the
/// semantic mask from the dynamic flags.
Frame scene_frame(const SyntheticScene& scene, double saliency = 1.0);

/// The scene observed after the sensor moved: every point is mapped by
/// `target_from_source`, dynamic points are additionally shifted by
/// `dynamic_offset` (expressed in the target frame).
SyntheticScene move_scene(const SyntheticScene& scene, const RigidTransform& target_from_source,
                          const Vec3& dynamic_offset = Vec3::Zero());

/// Axis-aligned boxes over a ground plane, for ray-cast scans.
struct Box {
    Vec3 lo;
    Vec3 hi;
    bool dynamic = false;
};

struct StreetScene {
    std::vector<Box> boxes;
    double ground_z = -1.7;
    double max_range = 80.0;
};

/// Building blocks on both sides of a street along +x, plus poles.
StreetScene make_street(std::mt19937_64& rng, double length = 120.0);

struct Scan {
    PointCloud cloud;                   // sensor frame
    std::vector<std::uint8_t> dynamic;  // per point
};

/// One return per range-image pixel center, so projecting the scan with the
/// same parameters reproduces it pixel for pixel.
Scan raycast(const StreetScene& scene, const RigidTransform& world_from_sensor, const ProjectionParams& params);

double translation_error(const RigidTransform& estimate, const RigidTransform& truth);
double rotation_error_deg(const RigidTransform& estimate, const RigidTransform& truth);

}  // namespace salodom::testing
