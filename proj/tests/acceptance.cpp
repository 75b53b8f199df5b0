// One PASS/FAIL/SKIP line per acceptance criterion, with the measured values.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "salodom/error.hpp"
#include "salodom/evaluation.hpp"
#include "salodom/io.hpp"
#include "salodom/odometry.hpp"
#include "salodom/saliency_transfer.hpp"
#include "salodom/semantics.hpp"
#include "scenes.hpp"

using namespace salodom;
using namespace salodom::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

Verdict pass_if(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

constexpr double kDeg = std::numbers::pi / 180.0;

// 1. exact recovery of known motions
Verdict pose_recovery() {
    const auto t0 = Clock::now();
    int ok = 0;
    double worst_t = 0, worst_r = 0;
    for (int s = 0; s < 100; ++s) {
        std::mt19937_64 rng(1000 + s);
        const SyntheticScene scene = make_scene(rng, 5000);
        const RigidTransform T = random_motion(rng, 0.5, 2.0 * kDeg);
        const SolveResult r = solve_frame_pair(scene_frame(scene), scene_frame(move_scene(scene, T)), OdometryConfig{});
        const double te = translation_error(r.transform, T), re = rotation_error_deg(r.transform, T);
        worst_t = std::max(worst_t, te);
        worst_r = std::max(worst_r, re);
        ok += te <= 1e-3 && re <= 0.01;
    }
    const double dt = seconds_since(t0);
    return pass_if(ok >= 99 && dt < 60.0, fmt("%d/100 within 1e-3 m / 0.01 deg, worst %.2e m / %.2e deg, %.2f s", ok,
                                              worst_t, worst_r, dt));
}

// 2. semantic weighting against a moving cluster
Verdict weighting_efficacy() {
    double sum[4] = {0, 0, 0, 0};
    const WeightingMode modes[4] = {WeightingMode::None, WeightingMode::SemanticOnly, WeightingMode::Both,
                                    WeightingMode::SaliencyOnly};
    for (int s = 0; s < 50; ++s) {
        std::mt19937_64 rng(5000 + s);
        const SyntheticScene scene = make_scene(rng, 5000, 0.2);
        const RigidTransform T = random_motion(rng, 0.5, 2.0 * kDeg);
        const double a = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        const SyntheticScene moved = move_scene(scene, T, Vec3(std::cos(a), std::sin(a), 0.0));
        const Frame src = scene_frame(scene, 1.0), tgt = scene_frame(moved, 1.0);
        for (int m = 0; m < 4; ++m) {
            OdometryConfig cfg;
            cfg.weighting = modes[m];
            sum[m] += translation_error(solve_frame_pair(src, tgt, cfg).transform, T);
        }
    }
    const double none = sum[0] / 50, sem = sum[1] / 50, both = sum[2] / 50, sal = sum[3] / 50;
    return pass_if(sem <= 0.5 * none && both <= 0.5 * none,
                   fmt("mean t_err none %.4f m, semantic_only %.4f m (%.2fx), both %.4f m (%.2fx), saliency_only "
                       "%.4f m",
                       none, sem, sem / none, both, both / none, sal));
}

Frame random_frame(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-5.0, 5.0), u01(0.0, 1.0);
    std::normal_distribution<double> g;
    Frame f;
    for (std::size_t i = 0; i < n; ++i) {
        f.points.emplace_back(u(rng), u(rng), u(rng));
        f.normals.push_back(Vec3(g(rng), g(rng), g(rng)).normalized());
        f.saliency.push_back(u01(rng));
        f.mask.push_back(u01(rng) < 0.3 ? 0.0 : 1.0);
    }
    return f;
}

Correspondences random_pairs(std::mt19937_64& rng, const Frame& src, const Frame& tgt, std::size_t n) {
    std::uniform_int_distribution<std::size_t> is(0, src.size() - 1), it(0, tgt.size() - 1);
    Correspondences corr;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = is(rng), j = it(rng);
        Correspondence c;
        c.source = i;
        c.target = j;
        c.target_point = tgt.points[j];
        c.target_normal = tgt.normals[j];
        c.source_saliency = src.saliency[i];
        c.target_saliency = tgt.saliency[j];
        c.source_mask = src.mask[i];
        c.target_mask = tgt.mask[j];
        corr.push_back(c);
    }
    return corr;
}

// 3. analytic gradient vs central differences
Verdict gradient_check() {
    std::mt19937_64 rng(3000);
    double worst = 0;
    int bad = 0;
    for (int t = 0; t < 100; ++t) {
        const Frame src = random_frame(rng, 40), tgt = random_frame(rng, 40);
        const Correspondences corr = random_pairs(rng, src, tgt, 30);
        OdometryConfig cfg;
        cfg.weighting = WeightingMode::Both;
        cfg.huber_delta = (t % 2) ? 0.0 : 2.0;
        const auto w = compute_weights(corr, cfg.weighting);
        const RigidTransform T = random_motion(rng, 2.0, 1.0);
        const LinearizedObjective lin = linearize_objective(corr, w, src, T, cfg);
        Vec6 fd;
        const double h = 1e-6;
        for (int d = 0; d < 6; ++d) {
            Vec6 e = Vec6::Zero();
            e(d) = h;
            fd(d) = (weighted_objective(corr, w, src, se3_exp(e) * T, cfg) -
                     weighted_objective(corr, w, src, se3_exp(-e) * T, cfg)) /
                    (2 * h);
        }
        const double rel = (lin.gradient - fd).norm() / std::max(fd.norm(), 1e-12);
        worst = std::max(worst, rel);
        bad += !(rel < 1e-4);
    }
    return pass_if(bad == 0, fmt("100 states, worst relative error %.2e, %d above 1e-4", worst, bad));
}

// 4. unit weights, W bounds, dynamic endpoints
Verdict weight_exactness() {
    std::mt19937_64 rng(4000);
    int mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        const Frame src = random_frame(rng, 50), tgt = random_frame(rng, 50);
        const Correspondences corr = random_pairs(rng, src, tgt, 40);
        const RigidTransform T = random_motion(rng, 1.0, 0.5);
        OdometryConfig cfg;
        cfg.weighting = WeightingMode::None;
        const std::vector<double> ones(corr.size(), 1.0);
        const Frame moved = transform_frame(src, T);
        const double plain = combined_loss(point_to_plane_loss(corr, moved.points, cfg.huber_delta).loss,
                                           normal_to_normal_loss(corr, moved.normals).loss, cfg.lambda);
        mismatches += weighted_objective(corr, ones, src, T, cfg) != plain;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Correspondences many(1'000'000);
    for (auto& c : many) {
        c.source_saliency = u(rng);
        c.target_saliency = u(rng);
        c.source_mask = u(rng);
        c.target_mask = u(rng);
    }
    const auto w = compute_weights(many, WeightingMode::Both);
    std::size_t out_of_bounds = 0;
    for (double v : w) out_of_bounds += !(v >= 1.0 && v <= std::numbers::e);
    std::size_t dynamic_not_one = 0;
    for (auto& c : many) (u(rng) < 0.5 ? c.source_mask : c.target_mask) = 0.0;
    for (double v : compute_weights(many, WeightingMode::Both)) dynamic_not_one += v != 1.0;
    return pass_if(mismatches == 0 && out_of_bounds == 0 && dynamic_not_one == 0,
                   fmt("%d/200 unit-weight mismatches, %zu of 1e6 W outside [1,e], %zu dynamic pairs with W != 1",
                       mismatches, out_of_bounds, dynamic_not_one));
}

Trajectory straight_line(std::size_t n, double scale) {
    Trajectory t;
    for (std::size_t i = 0; i < n; ++i) {
        t.poses.push_back(RigidTransform::from_translation(Vec3(0, 0, scale * static_cast<double>(i))));
    }
    return t;
}

// 5. metric identities
Verdict metric_identities() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_identity = 0, min_kld = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> a(200), b(200);
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        const PointSaliency p = all_valid(a), q = all_valid(b);
        worst_identity = std::max({worst_identity, std::abs(saliency_cc(p, p) - 1.0), std::abs(saliency_sim(p, p) - 1.0),
                                   std::abs(saliency_kld(p, p))});
        min_kld = std::min(min_kld, saliency_kld(p, q));
    }
    // gt-vs-gt on a curved random walk
    std::vector<RigidTransform> steps;
    for (int i = 0; i < 600; ++i) steps.push_back(random_motion(rng, 1.5, 2.0 * kDeg));
    const Trajectory walk = accumulate_trajectory(steps);
    const EvalReport self = kitti_relative_errors(walk, walk);
    const Trajectory gt = straight_line(801, 1.0);
    const EvalReport scaled = kitti_relative_errors(straight_line(801, 1.01), gt);
    const bool ok = worst_identity <= 1e-9 && min_kld >= 0.0 && self.t_rel <= 1e-12 && self.r_rel <= 1e-12 &&
                    std::abs(scaled.t_rel - 1.0) <= 1e-6;
    return pass_if(ok, fmt("identity error %.1e, min KLD %.3e, gt-vs-gt t_rel %.1e r_rel %.1e, scaled t_rel %.9f%%",
                           worst_identity, min_kld, self.t_rel, self.r_rel, scaled.t_rel));
}

// 6. saliency transfer against hand-computed bilinear values
Verdict transfer_correctness() {
    CameraModel cam;
    cam.fx = 200;
    cam.fy = 180;
    cam.cx = 8;
    cam.cy = 6;
    cam.image_width = 16;
    cam.image_height = 12;
    cam.cam_from_lidar = RigidTransform::from_axis_angle(Vec3::UnitY(), 0.1, Vec3(0.2, -0.1, 0.05));
    GrayImage img{16, 12, {}};
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x) img.values.push_back(std::fmod(0.37 * x + 0.11 * y * y, 1.0));

    // place points at chosen pixel coordinates and depths
    const double targets[][3] = {{3.25, 4.5, 7.0}, {0.5, 0.75, 12.0}, {14.75, 10.2, 3.0}, {8.5, 6.125, 40.0}};
    PointCloud cloud;
    for (const auto& t : targets) {
        const Vec3 pc((t[0] - cam.cx) / cam.fx * t[2], (t[1] - cam.cy) / cam.fy * t[2], t[2]);
        cloud.positions.push_back(cam.cam_from_lidar.inverse().apply(pc));
    }
    const PointSaliency s = sample_saliency(img, project_to_image(cloud, cam));
    double worst = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double u = targets[i][0], v = targets[i][1];
        const int x0 = static_cast<int>(std::floor(u)), y0 = static_cast<int>(std::floor(v));
        const int x1 = std::min(x0 + 1, 15), y1 = std::min(y0 + 1, 11);
        const double fx = u - x0, fy = v - y0;
        const double hand = (1 - fy) * ((1 - fx) * img.at(x0, y0) + fx * img.at(x1, y0)) +
                            fy * ((1 - fx) * img.at(x0, y1) + fx * img.at(x1, y1));
        worst = std::max(worst, std::abs(s.values[i] - hand));
        if (!s.valid[i]) worst = std::numeric_limits<double>::infinity();
    }

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    double gauge = 0;
    for (int t = 0; t < 50; ++t) {
        const RigidTransform G = RigidTransform::from_axis_angle(Vec3(r(rng), r(rng), r(rng)), 3 * r(rng),
                                                                 Vec3(10 * r(rng), 10 * r(rng), 10 * r(rng)));
        CameraModel moved = cam;
        moved.cam_from_lidar = cam.cam_from_lidar * G.inverse();
        const PointSaliency a = sample_saliency(img, project_to_image(cloud, cam));
        const PointSaliency b = sample_saliency(img, project_to_image(transform_cloud(cloud, G), moved));
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (a.valid[i] != b.valid[i]) gauge = std::numeric_limits<double>::infinity();
            gauge = std::max(gauge, std::abs(a.values[i] - b.values[i]));
        }
    }
    return pass_if(worst <= 1e-9 && gauge <= 1e-9,
                   fmt("worst bilinear deviation %.2e, worst gauge deviation %.2e", worst, gauge));
}

// 7. fuzzed round trips
Verdict io_round_trips() {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255), len(0, 64);
    std::uniform_real_distribution<float> uf(-100.0f, 100.0f), u01(0.0f, 1.0f);
    int scan_bad = 0, label_bad = 0, chan_bad = 0, pgm_bad = 0, pose_bad = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<std::uint8_t> scan;
        for (int i = 0, n = len(rng); i < n; ++i) {
            const float v[4] = {uf(rng), uf(rng), uf(rng), u01(rng)};
            scan.insert(scan.end(), reinterpret_cast<const std::uint8_t*>(v), reinterpret_cast<const std::uint8_t*>(v) + 16);
        }
        scan_bad += io::encode_kitti_scan(io::parse_kitti_scan(scan)) != scan;

        std::vector<std::uint8_t> labels(4 * static_cast<std::size_t>(len(rng)));
        for (auto& b : labels) b = static_cast<std::uint8_t>(byte(rng));
        label_bad += io::encode_label_words(io::parse_label_words(labels)) != labels;

        std::vector<double> values(static_cast<std::size_t>(len(rng)));
        for (auto& v : values) v = u01(rng);
        const auto chan = io::encode_point_channel(values);
        chan_bad += io::encode_point_channel(io::parse_point_channel(chan)) != chan;

        const int w = 1 + len(rng) % 17, h = 1 + len(rng) % 13;
        const std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
        std::vector<std::uint8_t> pgm(header.begin(), header.end());
        for (int k = 0; k < w * h; ++k) pgm.push_back(static_cast<std::uint8_t>(byte(rng)));
        pgm_bad += io::encode_pgm(io::parse_pgm(pgm)) != pgm;

        Trajectory traj;
        for (int i = 0; i < 4; ++i) traj.poses.push_back(random_motion(rng, 500.0, std::numbers::pi));
        const Trajectory back = io::parse_poses(io::format_poses(traj));
        for (std::size_t i = 0; i < traj.size(); ++i) {
            double a[12], b[12];
            traj.poses[i].to_matrix3x4(a);
            back.poses[i].to_matrix3x4(b);
            for (int k = 0; k < 12; ++k) pose_bad += std::abs(a[k] - b[k]) > 1e-8 * std::max(1.0, std::abs(a[k]));
        }
    }
    return pass_if(scan_bad + label_bad + chan_bad + pgm_bad + pose_bad == 0,
                   fmt("1000 cases each; mismatches scan %d, label %d, channel %d, pgm %d, pose entries %d", scan_bad,
                       label_bad, chan_bad, pgm_bad, pose_bad));
}

// Tr from a KITTI calib.txt; poses.txt is in camera-0 coordinates.
RigidTransform velo_to_cam(const std::string& calib) {
    std::istringstream in(calib);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("Tr:", 0) == 0) return io::parse_poses(line.substr(3)).poses.at(0);
    }
    fail(ErrorCode::Format, "calib.txt has no Tr entry");
}

// 8. optional real-data smoke test on KITTI sequence 09
Verdict kitti_smoke() {
    const char* root_env = std::getenv("SALODOM_KITTI_SEQ09");
    if (root_env == nullptr || !fs::is_directory(fs::path(root_env) / "velodyne")) {
        return {Outcome::Skip, "set SALODOM_KITTI_SEQ09 to a sequence directory with velodyne/ and labels/"};
    }
    const auto t0 = Clock::now();
    const auto layout = io::DatasetLayout::kitti(root_env);
    fs::path pose_file = layout.pose_file;
    if (const char* p = std::getenv("SALODOM_KITTI_POSES09")) pose_file = p;
    const bool have_labels = fs::is_directory(layout.label_dir);
    const bool have_saliency = fs::is_directory(layout.saliency_dir);
    auto files = io::list_frames(layout, have_labels, have_saliency);
    if (files.size() > 200) files.resize(200);
    if (files.size() < 2) return {Outcome::Fail, "fewer than two scans"};

    const BinarizationTable table = BinarizationTable::semantic_kitti();
    const ProjectionParams proj;
    std::vector<Frame> frames;
    for (const auto& f : files) {
        PointCloud cloud = io::read_kitti_scan(f.scan);
        if (have_labels) {
            cloud.channels[kSemanticChannel] = binarize_semantics(io::read_labels(f.label, cloud.size()), table).values;
        }
        if (have_saliency) cloud.channels[kSaliencyChannel] = io::read_point_channel(f.saliency, cloud.size());
        const RangeImage image = spherical_project(cloud, proj);
        frames.push_back(make_frame(image, estimate_normals(image)));
    }
    OdometryConfig cfg;
    cfg.weighting = WeightingMode::Both;
    const SequenceResult seq = run_sequence(frames, cfg, true);
    std::size_t non_finite = 0;
    for (const auto& d : seq.diagnostics) non_finite += !std::isfinite(d.final_loss);
    const Trajectory est = accumulate_trajectory(seq.relative);

    std::string eval = "no ground-truth poses";
    bool report_ok = true;
    if (fs::exists(pose_file)) {
        Trajectory gt = io::read_poses(pose_file);
        gt.poses.resize(std::min(gt.size(), est.size()));
        // camera-frame poses -> lidar frame when the calibration is available
        if (fs::exists(layout.calib_file)) {
            const RigidTransform Tr = velo_to_cam(io::read_text(layout.calib_file)), Tr_inv = Tr.inverse();
            for (auto& p : gt.poses) p = Tr_inv * p * Tr;
        }
        if (gt.size() == est.size()) {
            const EvalReport r = kitti_relative_errors(est, gt, "09");
            report_ok = std::isfinite(r.t_rel) && std::isfinite(r.r_rel);
            eval = r.too_short ? "trajectory too short for KITTI segments"
                               : fmt("t_rel %.3f %%, r_rel %.3f deg/100m over %zu segments", r.t_rel, r.r_rel, r.samples);
        } else {
            report_ok = false;
            eval = "pose file shorter than the scan list";
        }
    }
    const double dt = seconds_since(t0);
    return pass_if(non_finite == 0 && report_ok && dt < 300.0,
                   fmt("%zu frames, %zu non-finite losses, %s, %.1f s", frames.size(), non_finite, eval.c_str(), dt));
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"synthetic pose recovery", pose_recovery},
        {"weighting efficacy", weighting_efficacy},
        {"gradient correctness", gradient_check},
        {"weight exactness", weight_exactness},
        {"metric identities", metric_identities},
        {"saliency transfer", transfer_correctness},
        {"io round trips", io_round_trips},
        {"KITTI 09 smoke test", kitti_smoke},
    };
    int failures = 0;
    for (std::size_t i = 0; i < std::size(criteria); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {Outcome::Fail, std::string("threw: ") + e.what()};
        }
        const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "SKIP";
        failures += v.outcome == Outcome::Fail;
        std::printf("%s criterion %zu (%s): %s\n", tag, i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
