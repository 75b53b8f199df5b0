#include "scenes.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace salodom::testing {

namespace {

struct Rect {
    Vec3 origin;
    Vec3 du;  // edge vectors
    Vec3 dv;
};

Vec3 rect_normal(const Rect& r) { return r.du.cross(r.dv).normalized(); }

// Faces of a box standing on z = z0 with yaw `yaw`, without the bottom face.
std::vector<Rect> box_faces(const Vec3& center_xy, double sx, double sy, double sz, double z0, double yaw) {
    const Vec3 ex(std::cos(yaw), std::sin(yaw), 0.0);
    const Vec3 ey(-std::sin(yaw), std::cos(yaw), 0.0);
    const Vec3 ez = Vec3::UnitZ();
    const Vec3 c(center_xy.x(), center_xy.y(), z0);
    const Vec3 a = c - 0.5 * sx * ex - 0.5 * sy * ey;  // corner on the ground
    std::vector<Rect> f;
    f.push_back({a, sx * ex, sz * ez});
    f.push_back({a + sy * ey, sx * ex, sz * ez});
    f.push_back({a, sy * ey, sz * ez});
    f.push_back({a + sx * ex, sy * ey, sz * ez});
    f.push_back({a + sz * ez, sx * ex, sy * ey});
    return f;
}

double area(const Rect& r) { return r.du.cross(r.dv).norm(); }

void sample_rects(std::mt19937_64& rng, const std::vector<Rect>& rects, std::size_t count, bool dynamic,
                  SyntheticScene& out) {
    if (count == 0 || rects.empty()) return;
    std::vector<double> w;
    for (const auto& r : rects) w.push_back(area(r));
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
        const Rect& r = rects[pick(rng)];
        const Vec3 p = r.origin + u01(rng) * r.du + u01(rng) * r.dv;
        Vec3 n = rect_normal(r);
        if (n.dot(p) > 0.0) n = -n;
        out.points.push_back(p);
        out.normals.push_back(n);
        out.dynamic.push_back(dynamic ? 1 : 0);
    }
}

}  // namespace

SyntheticScene make_scene(std::mt19937_64& rng, std::size_t n_points, double dynamic_fraction) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double ground_z = -1.7;
    const double pi = std::numbers::pi;

    std::vector<Rect> ground = {{Vec3(-20, -20, ground_z), Vec3(40, 0, 0), Vec3(0, 40, 0)}};

    // Walls in four sectors so every horizontal direction is constrained.
    std::vector<Rect> walls;
    for (int k = 0; k < 4; ++k) {
        const double bearing = k * 0.5 * pi + (u01(rng) - 0.5) * 0.6;
        const double dist = 8.0 + 7.0 * u01(rng);
        const double yaw = bearing + (u01(rng) - 0.5) * 0.8;  // wall direction off the radial normal
        const Vec3 center(dist * std::cos(bearing), dist * std::sin(bearing), ground_z);
        const Vec3 along(-std::sin(yaw), std::cos(yaw), 0.0);
        const double len = 10.0 + 8.0 * u01(rng);
        const double h = 4.0 + 4.0 * u01(rng);
        walls.push_back({center - 0.5 * len * along, len * along, Vec3(0, 0, h)});
    }

    std::vector<Rect> boxes;
    for (int k = 0; k < 6; ++k) {
        const double bearing = 2.0 * pi * u01(rng);
        const double dist = 4.0 + 8.0 * u01(rng);
        const auto faces = box_faces(Vec3(dist * std::cos(bearing), dist * std::sin(bearing), 0.0),
                                     1.0 + 3.0 * u01(rng), 1.0 + 3.0 * u01(rng), 0.8 + 2.5 * u01(rng), ground_z,
                                     pi * u01(rng));
        boxes.insert(boxes.end(), faces.begin(), faces.end());
    }

    SyntheticScene scene;
    const auto n_dynamic = static_cast<std::size_t>(std::llround(dynamic_fraction * static_cast<double>(n_points)));
    const std::size_t n_static = n_points - n_dynamic;
    const auto n_ground = static_cast<std::size_t>(0.3 * static_cast<double>(n_static));
    const auto n_walls = static_cast<std::size_t>(0.4 * static_cast<double>(n_static));
    sample_rects(rng, ground, n_ground, false, scene);
    sample_rects(rng, walls, n_walls, false, scene);
    sample_rects(rng, boxes, n_static - n_ground - n_walls, false, scene);

    if (n_dynamic > 0) {
        const double bearing = 2.0 * pi * u01(rng);
        const double dist = 5.0 + 3.0 * u01(rng);
        const auto car = box_faces(Vec3(dist * std::cos(bearing), dist * std::sin(bearing), 0.0), 4.2, 1.8, 1.5,
                                   ground_z, pi * u01(rng));
        sample_rects(rng, car, n_dynamic, true, scene);
    }
    return scene;
}

RigidTransform random_motion(std::mt19937_64& rng, double max_translation, double max_angle) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Vec3 axis = Vec3(g(rng), g(rng), g(rng)).normalized();
    const Vec3 dir = Vec3(g(rng), g(rng), g(rng)).normalized();
    const double angle = max_angle * u01(rng);
    const double dist = max_translation * std::cbrt(u01(rng));
    return RigidTransform::from_axis_angle(axis, angle, dist * dir);
}

Frame scene_frame(const SyntheticScene& scene, double saliency) {
    Frame f;
    f.points = scene.points;
    f.normals = scene.normals;
    f.saliency.assign(scene.points.size(), saliency);
    f.mask.resize(scene.points.size());
    for (std::size_t i = 0; i < scene.points.size(); ++i) f.mask[i] = scene.dynamic[i] ? 0.0 : 1.0;
    return f;
}

SyntheticScene move_scene(const SyntheticScene& scene, const RigidTransform& target_from_source,
                          const Vec3& dynamic_offset) {
    SyntheticScene out = scene;
    for (std::size_t i = 0; i < scene.points.size(); ++i) {
        out.points[i] = target_from_source.apply(scene.points[i]);
        if (scene.dynamic[i]) out.points[i] += dynamic_offset;
        out.normals[i] = target_from_source.rotate(scene.normals[i]);
    }
    return out;
}

double translation_error(const RigidTransform& estimate, const RigidTransform& truth) {
    return (estimate.translation() - truth.translation()).norm();
}

double rotation_error_deg(const RigidTransform& estimate, const RigidTransform& truth) {
    return (truth.inverse() * estimate).angle() * 180.0 / std::numbers::pi;
}

}  // namespace salodom::testing

namespace salodom::testing {

StreetScene make_street(std::mt19937_64& rng, double length) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    StreetScene s;
    for (int side = -1; side <= 1; side += 2) {
        double x = -30.0;
        while (x < length) {
            const double w = 8.0 + 10.0 * u01(rng);
            const double y0 = side * (7.0 + 3.0 * u01(rng));
            const double depth = 6.0 + 4.0 * u01(rng);
            const double height = 4.0 + 8.0 * u01(rng);
            Box b;
            b.lo = Vec3(x, std::min(y0, y0 + side * depth), s.ground_z);
            b.hi = Vec3(x + w, std::max(y0, y0 + side * depth), s.ground_z + height);
            s.boxes.push_back(b);
            x += w + 2.0 + 4.0 * u01(rng);  // gap between blocks
        }
        for (double px = -20.0; px < length; px += 9.0 + 4.0 * u01(rng)) {
            const double py = side * 5.5;
            s.boxes.push_back({Vec3(px, py - 0.15, s.ground_z), Vec3(px + 0.3, py + 0.15, s.ground_z + 4.0)});
        }
    }
    return s;
}

namespace {

// Slab test; returns the entry distance or +inf.
double hit_box(const Box& b, const Vec3& o, const Vec3& d) {
    double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-15) {
            if (o[a] < b.lo[a] || o[a] > b.hi[a]) return std::numeric_limits<double>::infinity();
            continue;
        }
        double ta = (b.lo[a] - o[a]) / d[a], tb = (b.hi[a] - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return std::numeric_limits<double>::infinity();
    }
    return t0 > 0.0 ? t0 : std::numeric_limits<double>::infinity();
}

}  // namespace

Scan raycast(const StreetScene& scene, const RigidTransform& world_from_sensor, const ProjectionParams& params) {
    Scan scan;
    const Vec3 o = world_from_sensor.translation();
    const double fov = params.fov_up - params.fov_down;
    for (int row = 0; row < params.height; ++row) {
        const double pitch = params.fov_down + (1.0 - (row + 0.5) / params.height) * fov;
        for (int col = 0; col < params.width; ++col) {
            const double yaw = std::numbers::pi * (1.0 - 2.0 * (col + 0.5) / params.width);
            const Vec3 dl(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch));
            const Vec3 d = world_from_sensor.rotate(dl);
            double best = std::numeric_limits<double>::infinity();
            bool dyn = false;
            if (d.z() < 0.0) best = (scene.ground_z - o.z()) / d.z();
            for (const Box& b : scene.boxes) {
                const double t = hit_box(b, o, d);
                if (t < best) {
                    best = t;
                    dyn = b.dynamic;
                }
            }
            if (!(best <= scene.max_range)) continue;
            scan.cloud.positions.push_back(best * dl);
            scan.dynamic.push_back(dyn ? 1 : 0);
        }
    }
    return scan;
}

}  // namespace salodom::testing
