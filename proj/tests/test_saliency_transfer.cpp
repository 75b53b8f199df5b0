#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "salodom/error.hpp"
#include "salodom/saliency_transfer.hpp"

using namespace salodom;

namespace {

CameraModel simple_camera() {
    CameraModel cam;
    cam.fx = 100.0;
    cam.fy = 100.0;
    cam.cx = 320.0;
    cam.cy = 240.0;
    cam.image_width = 640;
    cam.image_height = 480;
    return cam;  // identity extrinsics: camera frame == lidar frame
}

GrayImage random_image(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage img{w, h, {}};
    for (int k = 0; k < w * h; ++k) img.values.push_back(u(rng));
    return img;
}

PointSaliency make(std::vector<double> v, std::vector<std::uint8_t> valid = {}) {
    PointSaliency s;
    s.values = std::move(v);
    s.valid = valid.empty() ? std::vector<std::uint8_t>(s.values.size(), 1) : std::move(valid);
    return s;
}

}  // namespace

TEST_SUITE("saliency_transfer") {
    TEST_CASE("project_to_image hand-computed cases") {
        const CameraModel cam = simple_camera();
        PointCloud c;
        c.positions = {Vec3(0, 0, 10), Vec3(0, 0, -5), Vec3(1, 0, 2), Vec3(0, 0, 0.05), Vec3(100, 0, 1)};
        const ImageProjection p = project_to_image(c, cam);
        CHECK(p.visible[0] == 1);
        CHECK(p.pixels[0].x() == 320.0);
        CHECK(p.pixels[0].y() == 240.0);
        CHECK(p.visible[1] == 0);
        CHECK(p.visible[2] == 1);
        CHECK(p.pixels[2].x() == doctest::Approx(370.0).epsilon(1e-15));
        CHECK(p.visible[3] == 0);  // inside the near plane
        CHECK(p.visible[4] == 0);  // off the image
    }

    TEST_CASE("camera validation") {
        CameraModel cam = simple_camera();
        cam.fx = 0.0;
        CHECK_THROWS_AS(cam.validate(), Error);
        cam = simple_camera();
        cam.cx = 640.0;
        CHECK_THROWS_AS(cam.validate(), Error);
    }

    TEST_CASE("fuse_annotators") {
        std::mt19937_64 rng(21);
        const GrayImage a = random_image(rng, 7, 5), b = random_image(rng, 7, 5), c = random_image(rng, 7, 5);

        SUBCASE("single map unchanged") { CHECK(fuse_annotators(std::vector{a}).values == a.values); }
        SUBCASE("constants average") {
            GrayImage lo{3, 2, std::vector<double>(6, 0.2)}, hi{3, 2, std::vector<double>(6, 0.6)};
            for (double v : fuse_annotators(std::vector{lo, hi}).values) CHECK(v == doctest::Approx(0.4).epsilon(1e-15));
        }
        SUBCASE("matches a pixel loop and is order independent") {
            const GrayImage f = fuse_annotators(std::vector{a, b, c});
            const GrayImage g = fuse_annotators(std::vector{c, a, b});
            for (std::size_t k = 0; k < f.values.size(); ++k) {
                const double oracle = (a.values[k] + b.values[k] + c.values[k]) / 3.0;
                CHECK(std::abs(f.values[k] - oracle) <= 1e-12);
                CHECK(std::abs(f.values[k] - g.values[k]) <= 1e-12);
            }
        }
        SUBCASE("errors") {
            CHECK_THROWS_AS(fuse_annotators(std::vector<GrayImage>{}), Error);
            CHECK_THROWS_AS(fuse_annotators(std::vector{a, random_image(rng, 5, 7)}), Error);
        }
    }

    TEST_CASE("sample_saliency interpolation") {
        GrayImage img{2, 2, {0.0, 1.0, 0.7, 0.2}};
        ImageProjection p;
        p.pixels = {{0.0, 1.0}, {0.5, 0.0}, {0.25, 0.75}, {1.0, 1.0}, {0.3, 0.3}};
        p.visible = {1, 1, 1, 1, 0};
        const PointSaliency s = sample_saliency(img, p);
        CHECK(s.values[0] == 0.7);          // on a pixel center
        CHECK(s.values[1] == 0.5);          // midway between 0 and 1
        // hand bilinear: top = 0.75*0 + 0.25*1, bottom = 0.75*0.7 + 0.25*0.2
        const double top = 0.25, bottom = 0.75 * 0.7 + 0.25 * 0.2;
        CHECK(std::abs(s.values[2] - (0.25 * top + 0.75 * bottom)) <= 1e-15);
        CHECK(s.values[3] == 0.2);  // far corner
        CHECK(s.values[4] == 0.0);
        CHECK(s.valid[4] == 0);
    }

    TEST_CASE("sampled values lie between the four neighboring pixels") {
        std::mt19937_64 rng(22);
        const GrayImage img = random_image(rng, 20, 10);
        std::uniform_real_distribution<double> uu(0.0, 19.0), vv(0.0, 9.0);
        ImageProjection p;
        for (int i = 0; i < 1000; ++i) p.pixels.emplace_back(uu(rng), vv(rng));
        p.visible.assign(p.pixels.size(), 1);
        const PointSaliency s = sample_saliency(img, p);
        for (std::size_t i = 0; i < p.pixels.size(); ++i) {
            const int x0 = static_cast<int>(std::floor(p.pixels[i].x())), y0 = static_cast<int>(std::floor(p.pixels[i].y()));
            const int x1 = std::min(x0 + 1, 19), y1 = std::min(y0 + 1, 9);
            const double lo = std::min({img.at(x0, y0), img.at(x1, y0), img.at(x0, y1), img.at(x1, y1)});
            const double hi = std::max({img.at(x0, y0), img.at(x1, y0), img.at(x0, y1), img.at(x1, y1)});
            CHECK(s.values[i] >= lo - 1e-15);
            CHECK(s.values[i] <= hi + 1e-15);
        }
    }

    TEST_CASE("normalize_saliency") {
        SUBCASE("affine endpoints") {
            const PointSaliency n = normalize_saliency(make({0.2, 0.6, 1.0}));
            CHECK(n.values[0] == 0.0);
            CHECK(n.values[1] == doctest::Approx(0.5).epsilon(1e-15));
            CHECK(n.values[2] == 1.0);
        }
        SUBCASE("constant input") {
            for (double v : normalize_saliency(make({0.3, 0.3, 0.3})).values) CHECK(v == 0.5);
        }
        SUBCASE("invalid points are left alone and do not set the range") {
            const PointSaliency n = normalize_saliency(make({5.0, 0.2, 0.4, 0.0}, {0, 1, 1, 0}));
            CHECK(n.values[1] == 0.0);
            CHECK(n.values[2] == 1.0);
            CHECK(n.values[0] == 5.0);
        }
        SUBCASE("no valid points") {
            CHECK_THROWS_WITH_AS(normalize_saliency(make({0.1, 0.2}, {0, 0})), "no visible points", Error);
        }
        SUBCASE("random inputs: range [0,1] exactly, idempotent") {
            std::mt19937_64 rng(23);
            std::uniform_real_distribution<double> u(-3.0, 7.0);
            for (int t = 0; t < 100; ++t) {
                std::vector<double> v;
                for (int i = 0; i < 50; ++i) v.push_back(u(rng));
                const PointSaliency once = normalize_saliency(make(v));
                CHECK(*std::min_element(once.values.begin(), once.values.end()) == 0.0);
                CHECK(*std::max_element(once.values.begin(), once.values.end()) == 1.0);
                const PointSaliency twice = normalize_saliency(once);
                for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(twice.values[i] - once.values[i]) <= 1e-12);
            }
        }
    }

    TEST_CASE("gauge invariance of projection") {
        std::mt19937_64 rng(24);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        CameraModel cam = simple_camera();
        cam.cam_from_lidar = RigidTransform::from_axis_angle(Vec3(0.2, 1.0, -0.3), 0.4, Vec3(0.1, -0.2, 0.3));
        PointCloud c;
        for (int i = 0; i < 500; ++i) c.positions.emplace_back(5 * u(rng), 5 * u(rng), 8 + 4 * u(rng));
        for (int t = 0; t < 20; ++t) {
            const RigidTransform G = RigidTransform::from_axis_angle(Vec3(u(rng), u(rng), u(rng)), 3 * u(rng),
                                                                     Vec3(10 * u(rng), 10 * u(rng), 10 * u(rng)));
            CameraModel moved = cam;
            moved.cam_from_lidar = cam.cam_from_lidar * G.inverse();
            const ImageProjection a = project_to_image(c, cam);
            const ImageProjection b = project_to_image(transform_cloud(c, G), moved);
            for (std::size_t i = 0; i < c.size(); ++i) {
                CHECK(a.visible[i] == b.visible[i]);
                if (a.visible[i]) CHECK((a.pixels[i] - b.pixels[i]).cwiseAbs().maxCoeff() <= 1e-9);
            }
        }
    }

    TEST_CASE("transfer_saliency averages cameras that see a point") {
        CameraModel front = simple_camera();
        CameraModel tilted = simple_camera();
        tilted.cam_from_lidar = RigidTransform::from_translation(Vec3(0.5, 0.0, 0.0));
        GrayImage a{640, 480, std::vector<double>(640 * 480, 0.2)};
        GrayImage b{640, 480, std::vector<double>(640 * 480, 0.8)};
        PointCloud c;
        c.positions = {Vec3(0, 0, 10), Vec3(-32.5, 0, 10), Vec3(0, 0, -10)};
        // point 1 projects to u = -5 in `front` (invisible) and u = 0 in `tilted`
        const std::vector<CameraView> views = {{front, a}, {tilted, b}};
        const PointSaliency s = transfer_saliency(c, views);
        CHECK(s.values[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s.valid[1] == 1);
        CHECK(s.values[1] == 0.8);
        CHECK(s.valid[2] == 0);
        CHECK(s.values[2] == 0.0);
    }
}
